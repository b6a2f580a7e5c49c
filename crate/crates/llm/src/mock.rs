use crate::{ChatClient, LlmError, Message};
use std::collections::HashMap;

/// Marker line the prompt's task section opens with; the mock reads the
/// instruction back out of the rendered prompt after this marker.
pub const TASK_MARKER: &str = "Write a reward function for the following task: ";

/// The canned reply for "boxing with two arms": guard both hands near the
/// torso and keep them close together, each distance squashed through an
/// exponential with its own temperature, averaged into one scalar.
pub const BOXING_PROGRAM: &str = "\
temp_hand_torso = 0.2
temp_hands = 0.2
left_hand_to_torso_dist = norm(left_hand.pos - torso.pos)
right_hand_to_torso_dist = norm(right_hand.pos - torso.pos)
hands_distance = norm(left_hand.pos - right_hand.pos)
left_hand_reward = exp(-left_hand_to_torso_dist / temp_hand_torso)
right_hand_reward = exp(-right_hand_to_torso_dist / temp_hand_torso)
hands_proximity_reward = exp(-hands_distance / temp_hands)
return (left_hand_reward + right_hand_reward + hands_proximity_reward) / 3.0
";

/// Offline stand-in for a hosted model. The reply is a pure function of
/// (instruction, attempt index): the instruction is recovered from the first
/// user message, the attempt index is the number of assistant turns already
/// in the conversation. Instructions map to scripted response sequences; the
/// last entry repeats once the script is exhausted. Unknown instructions get
/// a trivial valid program.
#[derive(Clone, Debug, Default)]
pub struct MockLlm {
    scripts: HashMap<String, Vec<String>>,
}

impl MockLlm {
    pub fn new() -> MockLlm {
        MockLlm::default().with_program("boxing with two arms", BOXING_PROGRAM)
    }

    /// Script the exact reply texts for one instruction, one per attempt.
    pub fn with_responses(
        mut self,
        instruction: impl Into<String>,
        responses: Vec<String>,
    ) -> MockLlm {
        assert!(!responses.is_empty(), "script needs at least one response");
        self.scripts.insert(instruction.into(), responses);
        self
    }

    /// Script a single well-formed reply wrapping `source` in a reward fence.
    pub fn with_program(self, instruction: impl Into<String>, source: &str) -> MockLlm {
        self.with_responses(instruction, vec![fence(source)])
    }

    fn reply(&self, instruction: &str, attempt: usize) -> String {
        match self.scripts.get(instruction) {
            Some(responses) => responses[attempt.min(responses.len() - 1)].clone(),
            None => fence("return 0.0"),
        }
    }
}

fn fence(source: &str) -> String {
    format!(
        "Here is a reward program for the task.\n\n```reward\n{}\n```\n",
        source.trim_end()
    )
}

impl ChatClient for MockLlm {
    fn complete(&self, messages: &[Message]) -> Result<String, LlmError> {
        let first_user = messages
            .iter()
            .find(|m| m.role == "user")
            .ok_or_else(|| LlmError::BadRequest("no user message".to_string()))?;
        let instruction = first_user
            .content
            .rfind(TASK_MARKER)
            .map(|i| first_user.content[i + TASK_MARKER.len()..].trim())
            .ok_or_else(|| LlmError::BadRequest("no task instruction in prompt".to_string()))?;
        let attempt = messages.iter().filter(|m| m.role == "assistant").count();
        Ok(self.reply(instruction, attempt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prompt_for(instruction: &str) -> Vec<Message> {
        vec![Message::user(format!(
            "prelude\n\n{TASK_MARKER}{instruction}"
        ))]
    }

    #[test]
    fn boxing_reply_contains_the_guard_program() {
        let mock = MockLlm::new();
        let reply = mock.complete(&prompt_for("boxing with two arms")).unwrap();
        assert!(reply.contains("```reward"));
        assert!(reply.contains("left_hand_to_torso_dist"));
        assert!(reply.contains("hands_proximity_reward"));
    }

    #[test]
    fn reply_is_pure_in_instruction_and_attempt() {
        let mock = MockLlm::new().with_responses(
            "wave",
            vec!["a".to_string(), "b".to_string(), "c".to_string()],
        );
        let mut messages = prompt_for("wave");
        assert_eq!(mock.complete(&messages).unwrap(), "a");
        assert_eq!(mock.complete(&messages).unwrap(), "a");
        messages.push(Message::assistant("a"));
        messages.push(Message::user("rejected, try again"));
        assert_eq!(mock.complete(&messages).unwrap(), "b");
        messages.push(Message::assistant("b"));
        messages.push(Message::user("rejected, try again"));
        assert_eq!(mock.complete(&messages).unwrap(), "c");
        messages.push(Message::assistant("c"));
        messages.push(Message::user("rejected, try again"));
        assert_eq!(mock.complete(&messages).unwrap(), "c");
    }

    #[test]
    fn unknown_instruction_gets_a_trivial_program() {
        let mock = MockLlm::new();
        let reply = mock.complete(&prompt_for("do a backflip")).unwrap();
        assert!(reply.contains("return 0.0"));
    }

    #[test]
    fn prompt_without_marker_is_rejected() {
        let mock = MockLlm::new();
        let err = mock.complete(&[Message::user("hello")]).unwrap_err();
        assert!(matches!(err, LlmError::BadRequest(_)));
    }
}

use crate::extract::extract_block;
use crate::prompt::{build_prompt, AgentDescription};
use crate::{ChatClient, Message};
use grove_dsl::{parse, validate, CompiledProgram};
use grove_env::EnvSpec;

pub const DEFAULT_MAX_RETRIES: usize = 3;
/// Inert constraint reward used when generation keeps failing.
pub const FALLBACK_SOURCE: &str = "return 0.0";

/// Outcome of one reward-generation call. `program` always validates against
/// the environment it was generated for; when every attempt failed it is the
/// fallback program and `degraded` is set.
#[derive(Clone, Debug)]
pub struct GenerationResult {
    /// DSL source of the accepted program.
    pub source: String,
    pub program: CompiledProgram,
    /// Raw completion text per attempt that produced a reply.
    pub raw_responses: Vec<String>,
    /// Why each failed attempt was rejected, in order.
    pub failures: Vec<String>,
    /// Attempts that reached the model (1-based count, <= max_retries).
    pub attempts: usize,
    pub degraded: bool,
}

/// Asks `client` for a reward program and keeps re-prompting with the
/// rejection reason until one parses and validates, up to `max_retries`
/// attempts. Transport failures that survive the client's own retries end
/// generation early. Never fails: a run out of attempts degrades to
/// [`FALLBACK_SOURCE`].
pub fn generate_reward(
    instruction: &str,
    spec: &EnvSpec,
    agent: &AgentDescription,
    client: &dyn ChatClient,
    max_retries: usize,
) -> GenerationResult {
    assert!(max_retries >= 1, "need at least one attempt");
    let bundle = build_prompt(spec, agent, instruction);
    let mut messages = vec![Message::user(bundle.render())];
    let mut raw_responses = Vec::new();
    let mut failures = Vec::new();

    for _ in 0..max_retries {
        let text = match client.complete(&messages) {
            Ok(text) => text,
            Err(err) => {
                failures.push(format!("transport: {err}"));
                break;
            }
        };
        raw_responses.push(text.clone());
        match accept(&text, spec) {
            Ok((source, program)) => {
                return GenerationResult {
                    source,
                    program,
                    attempts: raw_responses.len(),
                    raw_responses,
                    failures,
                    degraded: false,
                };
            }
            Err(reason) => {
                messages.push(Message::assistant(text));
                messages.push(Message::user(format!(
                    "That reply was rejected: {reason}\n\
                     Reply again with exactly one fenced code block tagged `reward` \
                     containing a corrected program."
                )));
                failures.push(reason);
            }
        }
    }

    let program = validate(&parse(FALLBACK_SOURCE).expect("fallback parses"), spec)
        .expect("fallback validates on every environment");
    GenerationResult {
        source: FALLBACK_SOURCE.to_string(),
        program,
        attempts: raw_responses.len(),
        raw_responses,
        failures,
        degraded: true,
    }
}

fn accept(text: &str, spec: &EnvSpec) -> Result<(String, CompiledProgram), String> {
    let source =
        extract_block(text).ok_or_else(|| "no fenced code block in the reply".to_string())?;
    let program = parse(&source).map_err(|e| e.to_string())?;
    let compiled = validate(&program, spec).map_err(|e| e.to_string())?;
    Ok((source, compiled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{LlmError, MockLlm};
    use grove_env::env_spec;
    use std::cell::RefCell;

    fn boxing_setup() -> (&'static EnvSpec, AgentDescription) {
        let spec = env_spec("stick_humanoid").unwrap();
        let agent = AgentDescription::for_env(spec);
        (spec, agent)
    }

    fn fenced(src: &str) -> String {
        format!("```reward\n{src}\n```")
    }

    #[test]
    fn boxing_succeeds_on_first_attempt() {
        let (spec, agent) = boxing_setup();
        let mock = MockLlm::new();
        let result = generate_reward("boxing with two arms", spec, &agent, &mock, 3);
        assert!(!result.degraded);
        assert_eq!(result.attempts, 1);
        assert!(result.failures.is_empty());
        assert!(result.source.contains("hands_proximity_reward"));
        assert_eq!(result.program.component_names().len(), 8);
    }

    #[test]
    fn invalid_then_valid_takes_two_attempts() {
        let (spec, agent) = boxing_setup();
        let mock = MockLlm::new().with_responses(
            "raise both hands",
            vec![
                fenced("return nonexistent_joint.pos.z"),
                fenced("return head.pos.z"),
            ],
        );
        let result = generate_reward("raise both hands", spec, &agent, &mock, 3);
        assert!(!result.degraded);
        assert_eq!(result.attempts, 2);
        assert_eq!(result.failures.len(), 1);
        assert!(result.failures[0].contains("nonexistent_joint"));
        assert_eq!(result.source, "return head.pos.z");
    }

    #[test]
    fn garbage_every_time_degrades_to_fallback() {
        let (spec, agent) = boxing_setup();
        let mock = MockLlm::new()
            .with_responses("gibberish", vec!["no code here, sorry".to_string()]);
        let result = generate_reward("gibberish", spec, &agent, &mock, 3);
        assert!(result.degraded);
        assert_eq!(result.attempts, 3);
        assert_eq!(result.raw_responses.len(), 3);
        assert_eq!(result.failures.len(), 3);
        assert_eq!(result.source, FALLBACK_SOURCE);
        let embed = grove_env::reset(spec, 0).embed;
        let r = result.program.evaluate(&embed, &vec![0.0; 45]).unwrap();
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn rejection_reason_is_fed_back_to_the_model() {
        struct Recording<'a> {
            inner: &'a MockLlm,
            seen: RefCell<Vec<Vec<Message>>>,
        }
        impl ChatClient for Recording<'_> {
            fn complete(&self, messages: &[Message]) -> Result<String, LlmError> {
                self.seen.borrow_mut().push(messages.to_vec());
                self.inner.complete(messages)
            }
        }

        let (spec, agent) = boxing_setup();
        let mock = MockLlm::new().with_responses(
            "kneel",
            vec![fenced("return ("), fenced("return 1.0")],
        );
        let client = Recording {
            inner: &mock,
            seen: RefCell::new(Vec::new()),
        };
        let result = generate_reward("kneel", spec, &agent, &client, 3);
        assert!(!result.degraded);
        assert_eq!(result.attempts, 2);

        let seen = client.seen.borrow();
        assert_eq!(seen[0].len(), 1);
        assert_eq!(seen[1].len(), 3);
        assert_eq!(seen[1][1].role, "assistant");
        assert!(seen[1][2].content.contains("rejected"));
        assert!(seen[1][2].content.contains(&result.failures[0]));
    }

    #[test]
    fn transport_failure_degrades_immediately() {
        struct Down;
        impl ChatClient for Down {
            fn complete(&self, _: &[Message]) -> Result<String, LlmError> {
                Err(LlmError::Transport {
                    attempts: 3,
                    last: "connection refused".to_string(),
                })
            }
        }
        let (spec, agent) = boxing_setup();
        let result = generate_reward("anything", spec, &agent, &Down, 3);
        assert!(result.degraded);
        assert_eq!(result.attempts, 0);
        assert!(result.raw_responses.is_empty());
        assert_eq!(result.failures.len(), 1);
        assert!(result.failures[0].starts_with("transport:"));
        assert_eq!(result.source, FALLBACK_SOURCE);
    }

    #[test]
    fn returned_program_always_validates_for_its_env() {
        let spec = env_spec("cartpole").unwrap();
        let agent = AgentDescription::for_env(spec);
        // boxing program references humanoid joints, so on cartpole it must be
        // rejected and repair attempts exhaust into the fallback
        let mock = MockLlm::new();
        let result = generate_reward("boxing with two arms", spec, &agent, &mock, 3);
        assert!(result.degraded);
        assert_eq!(result.source, FALLBACK_SOURCE);
        let embed = grove_env::reset(spec, 0).embed;
        assert!(result.program.evaluate(&embed, &[0.0]).is_ok());
    }
}

use crate::VlmError;
use grove_env::PoseVector;

/// Text-embedding backend: hosted service or the offline anchor mock.
pub trait EmbedClient {
    fn embed_text(&self, text: &str) -> Result<Vec<f64>, VlmError>;
}

impl<T: EmbedClient + ?Sized> EmbedClient for &T {
    fn embed_text(&self, text: &str) -> Result<Vec<f64>, VlmError> {
        (*self).embed_text(text)
    }
}

/// An instruction with its embedding computed exactly once. The fields are
/// private so nothing can swap the cached vector mid-run.
#[derive(Clone, Debug)]
pub struct Instruction {
    text: String,
    embedding: Vec<f64>,
}

impl Instruction {
    /// Embeds `text` through `client` and caches the result for the life of
    /// the value. Embedding failure aborts: the semantic reward cannot run
    /// without it.
    pub fn embed(text: &str, client: &dyn EmbedClient) -> Result<Instruction, VlmError> {
        if text.trim().is_empty() {
            return Err(VlmError::EmptyText);
        }
        let embedding = client.embed_text(text)?;
        if embedding.is_empty() || embedding.iter().all(|x| *x == 0.0) {
            return Err(VlmError::ZeroVector);
        }
        Ok(Instruction {
            text: text.to_string(),
            embedding,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn embedding(&self) -> &[f64] {
        &self.embedding
    }
}

/// A mock task: an instruction whose embedding is defined to be the oracle
/// embedding of `anchor`, making the anchor pose the known optimum of the
/// semantic reward.
#[derive(Clone, Debug)]
pub struct AnchorTask {
    pub instruction: String,
    pub anchor: PoseVector,
}

impl AnchorTask {
    pub fn new(instruction: impl Into<String>, anchor: PoseVector) -> Result<AnchorTask, VlmError> {
        let instruction = instruction.into();
        if instruction.trim().is_empty() {
            return Err(VlmError::EmptyText);
        }
        anchor
            .validate()
            .map_err(|e| VlmError::BadAnchor(e.to_string()))?;
        Ok(AnchorTask {
            instruction,
            anchor,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<f64>);
    impl EmbedClient for Fixed {
        fn embed_text(&self, _: &str) -> Result<Vec<f64>, VlmError> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn embedding_is_cached_and_exposed() {
        let client = Fixed(vec![0.1, 0.2]);
        let instr = Instruction::embed("wave", &client).unwrap();
        assert_eq!(instr.text(), "wave");
        assert_eq!(instr.embedding(), &[0.1, 0.2]);
    }

    #[test]
    fn empty_text_rejected() {
        let client = Fixed(vec![1.0]);
        assert!(matches!(
            Instruction::embed("  ", &client),
            Err(VlmError::EmptyText)
        ));
    }

    #[test]
    fn zero_embedding_rejected() {
        let client = Fixed(vec![0.0, 0.0]);
        assert!(matches!(
            Instruction::embed("wave", &client),
            Err(VlmError::ZeroVector)
        ));
    }

    #[test]
    fn anchor_pose_must_be_valid() {
        let bad = PoseVector {
            theta: vec![[9.0, 0.0, 0.0]],
        };
        assert!(matches!(
            AnchorTask::new("task", bad),
            Err(VlmError::BadAnchor(_))
        ));
        let good = PoseVector {
            theta: vec![[0.5, -0.5, 0.0]],
        };
        assert!(AnchorTask::new("task", good).is_ok());
    }
}

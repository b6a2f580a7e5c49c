use grove_env::EnvSpec;
use std::fmt::Write as _;

/// What the generator is told about the embodiment.
#[derive(Clone, Debug)]
pub struct AgentDescription {
    /// (index, joint name) in environment order.
    pub joints: Vec<(usize, String)>,
    pub up_axis: char,
    pub action_dim: usize,
}

impl AgentDescription {
    pub fn for_env(spec: &EnvSpec) -> AgentDescription {
        AgentDescription {
            joints: spec
                .joint_names
                .iter()
                .enumerate()
                .map(|(i, n)| (i, n.to_string()))
                .collect(),
            up_axis: spec.up_axis,
            action_dim: spec.action_dim,
        }
    }
}

/// The seven ordered prompt sections, kept separate so tests can check each.
#[derive(Clone, Debug)]
pub struct PromptBundle {
    pub role: String,
    pub goal: String,
    pub environment: String,
    pub agent: String,
    pub example_template: String,
    pub design_principles: String,
    pub task: String,
}

impl PromptBundle {
    pub fn sections(&self) -> [(&'static str, &str); 7] {
        [
            ("role", &self.role),
            ("goal", &self.goal),
            ("environment", &self.environment),
            ("agent", &self.agent),
            ("example template", &self.example_template),
            ("design principles", &self.design_principles),
            ("task", &self.task),
        ]
    }

    /// Single user-message text, sections in order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (_, body)) in self.sections().iter().enumerate() {
            if i > 0 {
                out.push_str("\n\n");
            }
            out.push_str(body);
        }
        out
    }
}

/// The template embedded in every prompt; must always parse as valid DSL for
/// the environment it is built against.
pub fn example_template(spec: &EnvSpec) -> String {
    let joint = spec.joint_names[0];
    format!(
        "temp = 0.2\nd = norm({joint}.pos)\nr = exp(-d / temp)\nreturn r"
    )
}

pub fn build_prompt(spec: &EnvSpec, agent: &AgentDescription, instruction: &str) -> PromptBundle {
    assert!(!instruction.trim().is_empty(), "instruction must be nonempty");

    let role = "You are a reward engineer. You write dense reward functions for a physics-simulated \
                agent in a small domain-specific reward language."
        .to_string();

    let goal = "Your goal is to write a reward program that, when maximized by reinforcement \
                learning, makes the agent perform the task described at the end of this prompt."
        .to_string();

    let mut environment = String::new();
    let _ = write!(
        environment,
        "Environment: {name}. Control timestep {dt} s, episode length {len} steps, up axis {up}.",
        name = spec.name,
        dt = spec.dt,
        len = spec.episode_length,
        up = spec.up_axis,
    );

    let mut agent_text = String::from("The agent exposes these joints (index: name):\n");
    for (i, name) in &agent.joints {
        let _ = writeln!(agent_text, "  {i}: {name}");
    }
    let _ = write!(
        agent_text,
        "Each joint has channels pos (3-vector), rot (quaternion x,y,z,w), vel (3-vector), \
         angvel (3-vector). Scalar axes are read as joint.channel.axis, e.g. {j0}.pos.z. \
         The action vector has {dim} entries, read as action[i].",
        j0 = agent.joints[0].1,
        dim = agent.action_dim,
    );

    let template = example_template(spec);
    debug_assert!(
        grove_dsl::parse(&template).is_ok(),
        "embedded template must parse"
    );
    let example = format!(
        "Reply with one fenced code block tagged `reward`. Example of the expected shape:\n\
         ```reward\n{template}\n```"
    );

    let principles = "Design principles:\n\
        1. Focus solely on capturing the essence of the task; do not add unrelated shaping terms.\n\
        2. If you transform a reward component (for example with exp), introduce a temperature \
           parameter inside the transformation; it must be a named variable in the program, with \
           its own temperature per transformed component.\n\
        3. Use only the joints and channels listed above; every name you reference must be a \
           prior binding, a joint channel, or action[i].\n\
        4. The language allows: bindings `name = expr`, final `return expr`, operators + - * /, \
           unary minus, and calls exp, abs, norm, dot, min, max, clamp. No loops, no conditionals, \
           no comments.\n\
        5. The returned value must be a scalar, and larger must mean better."
        .to_string();

    let task = format!("Write a reward function for the following task: {instruction}");

    PromptBundle {
        role,
        goal,
        environment,
        agent: agent_text,
        example_template: example,
        design_principles: principles,
        task,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use grove_env::env_spec;

    #[test]
    fn task_section_ends_with_instruction_verbatim() {
        let spec = env_spec("stick_humanoid").unwrap();
        let agent = AgentDescription::for_env(spec);
        let p = build_prompt(spec, &agent, "boxing with two arms");
        assert!(p.task.ends_with("boxing with two arms"));
        assert!(p.render().ends_with("boxing with two arms"));
    }

    #[test]
    fn prompt_is_deterministic() {
        let spec = env_spec("cartpole").unwrap();
        let agent = AgentDescription::for_env(spec);
        let a = build_prompt(spec, &agent, "balance the pole").render();
        let b = build_prompt(spec, &agent, "balance the pole").render();
        assert_eq!(a, b);
    }

    #[test]
    fn agent_section_lists_fifteen_joints_in_order() {
        let spec = env_spec("stick_humanoid").unwrap();
        let agent = AgentDescription::for_env(spec);
        let p = build_prompt(spec, &agent, "wave");
        for (i, name) in spec.joint_names.iter().enumerate() {
            assert!(p.agent.contains(&format!("{i}: {name}")));
        }
        let pelvis = p.agent.find("0: pelvis").unwrap();
        let foot = p.agent.find("14: left_foot").unwrap();
        assert!(pelvis < foot);
    }

    #[test]
    fn all_seven_sections_nonempty() {
        let spec = env_spec("planar_runner").unwrap();
        let agent = AgentDescription::for_env(spec);
        let p = build_prompt(spec, &agent, "run forward");
        for (name, body) in p.sections() {
            assert!(!body.trim().is_empty(), "section {name} is empty");
        }
    }

    #[test]
    fn embedded_template_parses_and_validates_for_every_env() {
        for name in grove_env::ENV_NAMES {
            let spec = env_spec(name).unwrap();
            let t = example_template(spec);
            let program = grove_dsl::parse(&t).unwrap();
            grove_dsl::validate(&program, spec).unwrap();
        }
    }
}

use crate::ast::{BinOp, Channel, Func};
use crate::validate::{CExpr, CompiledProgram, Ty};
use grove_env::StateEmbed;

pub const DIV_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vec3([f64; 3]),
    Vec4([f64; 4]),
}

impl Value {
    fn is_finite(&self) -> bool {
        match self {
            Value::Scalar(v) => v.is_finite(),
            Value::Vec3(v) => v.iter().all(|x| x.is_finite()),
            Value::Vec4(v) => v.iter().all(|x| x.is_finite()),
        }
    }

    fn scalar(&self) -> f64 {
        match self {
            Value::Scalar(v) => *v,
            _ => unreachable!("type checker admitted a vector where a scalar was required"),
        }
    }

    fn vec3(&self) -> [f64; 3] {
        match self {
            Value::Vec3(v) => *v,
            _ => unreachable!("type checker admitted a non-vec3 where a vec3 was required"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("non-finite value while evaluating `{0}`")]
    NonFinite(String),
    #[error("division by near-zero denominator while evaluating `{0}`")]
    DivisionNearZero(String),
    #[error("state has {got} joints, expected {expected}")]
    JointShape { expected: usize, got: usize },
    #[error("action has {got} entries, expected {expected}")]
    ActionShape { expected: usize, got: usize },
}

/// The reward value and its named scalar components, in program order.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub total: f64,
    pub components: Vec<(String, f64)>,
}

impl CompiledProgram {
    /// Sandboxed, pure evaluation of the program on one state-action pair.
    pub fn evaluate(&self, embed: &StateEmbed, action: &[f64]) -> Result<EvalResult, EvalError> {
        if embed.joints.len() != self.num_joints {
            return Err(EvalError::JointShape {
                expected: self.num_joints,
                got: embed.joints.len(),
            });
        }
        if action.len() != self.action_dim {
            return Err(EvalError::ActionShape {
                expected: self.action_dim,
                got: action.len(),
            });
        }
        let mut slots: Vec<Value> = Vec::with_capacity(self.bindings.len());
        let mut components = Vec::new();
        for b in &self.bindings {
            let v = eval_expr(&b.expr, &slots, embed, action, &b.name)?;
            if !v.is_finite() {
                return Err(EvalError::NonFinite(b.name.clone()));
            }
            if b.ty == Ty::Scalar {
                components.push((b.name.clone(), v.scalar()));
            }
            slots.push(v);
        }
        let total = eval_expr(&self.total, &slots, embed, action, "return")?;
        if !total.is_finite() {
            return Err(EvalError::NonFinite("return".to_string()));
        }
        Ok(EvalResult {
            total: total.scalar(),
            components,
        })
    }
}

fn eval_expr(
    expr: &CExpr,
    slots: &[Value],
    embed: &StateEmbed,
    action: &[f64],
    binding: &str,
) -> Result<Value, EvalError> {
    Ok(match expr {
        CExpr::Lit(v) => Value::Scalar(*v),
        CExpr::Slot(i) => slots[*i].clone(),
        CExpr::JointVec3 { joint, channel } => Value::Vec3(channel_vec3(embed, *joint, *channel)),
        CExpr::JointVec4 { joint } => {
            let q = embed.joints[*joint].rot;
            Value::Vec4([q.x, q.y, q.z, q.w])
        }
        CExpr::JointScalar {
            joint,
            channel,
            axis,
        } => {
            let v = match channel {
                Channel::Rot => {
                    let q = embed.joints[*joint].rot;
                    [q.x, q.y, q.z, q.w][*axis]
                }
                _ => channel_vec3(embed, *joint, *channel)[*axis],
            };
            Value::Scalar(v)
        }
        CExpr::Action(i) => Value::Scalar(action[*i]),
        CExpr::Neg(inner) => match eval_expr(inner, slots, embed, action, binding)? {
            Value::Scalar(v) => Value::Scalar(-v),
            Value::Vec3(v) => Value::Vec3([-v[0], -v[1], -v[2]]),
            Value::Vec4(v) => Value::Vec4([-v[0], -v[1], -v[2], -v[3]]),
        },
        CExpr::Bin(op, lhs, rhs) => {
            let l = eval_expr(lhs, slots, embed, action, binding)?;
            let r = eval_expr(rhs, slots, embed, action, binding)?;
            apply_bin(*op, l, r, binding)?
        }
        CExpr::Call(func, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_expr(a, slots, embed, action, binding)?);
            }
            apply_func(*func, &vals)
        }
    })
}

fn channel_vec3(embed: &StateEmbed, joint: usize, channel: Channel) -> [f64; 3] {
    let j = &embed.joints[joint];
    match channel {
        Channel::Pos => j.pos,
        Channel::Vel => j.vel,
        Channel::AngVel => j.ang_vel,
        Channel::Rot => unreachable!("rot is vec4"),
    }
}

fn apply_bin(op: BinOp, l: Value, r: Value, binding: &str) -> Result<Value, EvalError> {
    use Value::*;
    Ok(match (op, l, r) {
        (BinOp::Add, Scalar(a), Scalar(b)) => Scalar(a + b),
        (BinOp::Add, Vec3(a), Vec3(b)) => Vec3([a[0] + b[0], a[1] + b[1], a[2] + b[2]]),
        (BinOp::Add, Vec4(a), Vec4(b)) => {
            Vec4([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
        }
        (BinOp::Sub, Scalar(a), Scalar(b)) => Scalar(a - b),
        (BinOp::Sub, Vec3(a), Vec3(b)) => Vec3([a[0] - b[0], a[1] - b[1], a[2] - b[2]]),
        (BinOp::Sub, Vec4(a), Vec4(b)) => {
            Vec4([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
        }
        (BinOp::Mul, Scalar(a), Scalar(b)) => Scalar(a * b),
        (BinOp::Mul, Scalar(s), Vec3(v)) | (BinOp::Mul, Vec3(v), Scalar(s)) => {
            Vec3([s * v[0], s * v[1], s * v[2]])
        }
        (BinOp::Mul, Scalar(s), Vec4(v)) | (BinOp::Mul, Vec4(v), Scalar(s)) => {
            Vec4([s * v[0], s * v[1], s * v[2], s * v[3]])
        }
        (BinOp::Div, l, Scalar(b)) => {
            if b.abs() < DIV_GUARD {
                return Err(EvalError::DivisionNearZero(binding.to_string()));
            }
            match l {
                Scalar(a) => Scalar(a / b),
                Vec3(v) => Vec3([v[0] / b, v[1] / b, v[2] / b]),
                Vec4(v) => Vec4([v[0] / b, v[1] / b, v[2] / b, v[3] / b]),
            }
        }
        _ => unreachable!("type checker admitted an ill-typed binary op"),
    })
}

fn apply_func(func: Func, args: &[Value]) -> Value {
    match func {
        Func::Exp => Value::Scalar(args[0].scalar().exp()),
        Func::Abs => Value::Scalar(args[0].scalar().abs()),
        Func::Norm => {
            let v = args[0].vec3();
            Value::Scalar((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
        }
        Func::Dot => {
            let a = args[0].vec3();
            let b = args[1].vec3();
            Value::Scalar(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
        }
        Func::Min => Value::Scalar(args[0].scalar().min(args[1].scalar())),
        Func::Max => Value::Scalar(args[0].scalar().max(args[1].scalar())),
        // sequential clamp, total for any argument order
        Func::Clamp => Value::Scalar(args[0].scalar().max(args[1].scalar()).min(args[2].scalar())),
    }
}

//! Test support: a grammar sampler for random well-typed programs and a
//! naive tree-walking reference evaluator, kept deliberately separate from
//! the production evaluator so differential tests compare two independent
//! routes.

use crate::ast::{Axis, BinOp, Channel, Expr, ExprKind, Func, Pos, RewardProgram};
use crate::eval::{EvalError, EvalResult, Value};
use grove_env::{EnvSpec, JointState, Quat, StateEmbed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

const P0: Pos = Pos { line: 1, column: 1 };

#[derive(Clone, Copy, PartialEq, Eq)]
enum GTy {
    S,
    V3,
    V4,
}

/// Samples a well-typed program for `spec` from the grammar.
pub fn sample_program(spec: &EnvSpec, rng: &mut ChaCha8Rng) -> RewardProgram {
    let n_bindings = rng.gen_range(0..=4);
    let mut scope: Vec<(String, GTy)> = Vec::new();
    let mut bindings = Vec::new();
    for i in 0..n_bindings {
        let ty = match rng.gen_range(0..10) {
            0..=5 => GTy::S,
            6..=8 => GTy::V3,
            _ => GTy::V4,
        };
        let expr = gen_expr(ty, 3, &scope, spec, rng);
        let name = format!("b{i}");
        scope.push((name.clone(), ty));
        bindings.push((name, expr));
    }
    let total = gen_expr(GTy::S, 3, &scope, spec, rng);
    RewardProgram { bindings, total }
}

fn gen_expr(
    ty: GTy,
    depth: u32,
    scope: &[(String, GTy)],
    spec: &EnvSpec,
    rng: &mut ChaCha8Rng,
) -> Expr {
    let kind = if depth == 0 {
        gen_leaf(ty, scope, spec, rng)
    } else {
        let d = depth - 1;
        match ty {
            GTy::S => match rng.gen_range(0..12) {
                0 | 1 => gen_leaf(ty, scope, spec, rng),
                2 => ExprKind::Neg(Box::new(gen_expr(GTy::S, d, scope, spec, rng))),
                3 => bin(rng_choice(rng, &[BinOp::Add, BinOp::Sub]), GTy::S, GTy::S, d, scope, spec, rng),
                4 => bin(BinOp::Mul, GTy::S, GTy::S, d, scope, spec, rng),
                5 => bin(BinOp::Div, GTy::S, GTy::S, d, scope, spec, rng),
                6 => {
                    // bias exp toward bounded arguments so most programs stay finite
                    let arg = if rng.gen_bool(0.5) {
                        Expr {
                            kind: ExprKind::Neg(Box::new(Expr {
                                kind: ExprKind::Call(
                                    Func::Abs,
                                    vec![gen_expr(GTy::S, d, scope, spec, rng)],
                                ),
                                pos: P0,
                            })),
                            pos: P0,
                        }
                    } else {
                        gen_expr(GTy::S, d, scope, spec, rng)
                    };
                    ExprKind::Call(Func::Exp, vec![arg])
                }
                7 => ExprKind::Call(Func::Abs, vec![gen_expr(GTy::S, d, scope, spec, rng)]),
                8 => ExprKind::Call(Func::Norm, vec![gen_expr(GTy::V3, d, scope, spec, rng)]),
                9 => ExprKind::Call(
                    Func::Dot,
                    vec![
                        gen_expr(GTy::V3, d, scope, spec, rng),
                        gen_expr(GTy::V3, d, scope, spec, rng),
                    ],
                ),
                10 => ExprKind::Call(
                    rng_choice(rng, &[Func::Min, Func::Max]),
                    vec![
                        gen_expr(GTy::S, d, scope, spec, rng),
                        gen_expr(GTy::S, d, scope, spec, rng),
                    ],
                ),
                _ => ExprKind::Call(
                    Func::Clamp,
                    vec![
                        gen_expr(GTy::S, d, scope, spec, rng),
                        gen_expr(GTy::S, d, scope, spec, rng),
                        gen_expr(GTy::S, d, scope, spec, rng),
                    ],
                ),
            },
            GTy::V3 => match rng.gen_range(0..6) {
                0 | 1 => gen_leaf(ty, scope, spec, rng),
                2 => ExprKind::Neg(Box::new(gen_expr(GTy::V3, d, scope, spec, rng))),
                3 => bin(rng_choice(rng, &[BinOp::Add, BinOp::Sub]), GTy::V3, GTy::V3, d, scope, spec, rng),
                4 => {
                    if rng.gen_bool(0.5) {
                        bin(BinOp::Mul, GTy::S, GTy::V3, d, scope, spec, rng)
                    } else {
                        bin(BinOp::Mul, GTy::V3, GTy::S, d, scope, spec, rng)
                    }
                }
                _ => bin(BinOp::Div, GTy::V3, GTy::S, d, scope, spec, rng),
            },
            GTy::V4 => match rng.gen_range(0..6) {
                0 | 1 => gen_leaf(ty, scope, spec, rng),
                2 => ExprKind::Neg(Box::new(gen_expr(GTy::V4, d, scope, spec, rng))),
                3 => bin(rng_choice(rng, &[BinOp::Add, BinOp::Sub]), GTy::V4, GTy::V4, d, scope, spec, rng),
                4 => {
                    if rng.gen_bool(0.5) {
                        bin(BinOp::Mul, GTy::S, GTy::V4, d, scope, spec, rng)
                    } else {
                        bin(BinOp::Mul, GTy::V4, GTy::S, d, scope, spec, rng)
                    }
                }
                _ => bin(BinOp::Div, GTy::V4, GTy::S, d, scope, spec, rng),
            },
        }
    };
    Expr { kind, pos: P0 }
}

fn bin(
    op: BinOp,
    lt: GTy,
    rt: GTy,
    depth: u32,
    scope: &[(String, GTy)],
    spec: &EnvSpec,
    rng: &mut ChaCha8Rng,
) -> ExprKind {
    ExprKind::Bin(
        op,
        Box::new(gen_expr(lt, depth, scope, spec, rng)),
        Box::new(gen_expr(rt, depth, scope, spec, rng)),
    )
}

fn rng_choice<T: Copy>(rng: &mut ChaCha8Rng, options: &[T]) -> T {
    options[rng.gen_range(0..options.len())]
}

fn gen_leaf(ty: GTy, scope: &[(String, GTy)], spec: &EnvSpec, rng: &mut ChaCha8Rng) -> ExprKind {
    let named: Vec<&(String, GTy)> = scope.iter().filter(|(_, t)| *t == ty).collect();
    if !named.is_empty() && rng.gen_bool(0.3) {
        return ExprKind::Name(named[rng.gen_range(0..named.len())].0.clone());
    }
    let joint = spec.joint_names[rng.gen_range(0..spec.num_joints())].to_string();
    match ty {
        GTy::S => match rng.gen_range(0..3) {
            0 => ExprKind::Lit(rng.gen_range(-2.0..2.0)),
            1 => ExprKind::Action(rng.gen_range(0..spec.action_dim)),
            _ => {
                let channel = rng_choice(rng, &[Channel::Pos, Channel::Rot, Channel::Vel, Channel::AngVel]);
                let axis = if channel == Channel::Rot {
                    rng_choice(rng, &[Axis::X, Axis::Y, Axis::Z, Axis::W])
                } else {
                    rng_choice(rng, &[Axis::X, Axis::Y, Axis::Z])
                };
                ExprKind::Joint {
                    joint,
                    channel,
                    axis: Some(axis),
                }
            }
        },
        GTy::V3 => ExprKind::Joint {
            joint,
            channel: rng_choice(rng, &[Channel::Pos, Channel::Vel, Channel::AngVel]),
            axis: None,
        },
        GTy::V4 => ExprKind::Joint {
            joint,
            channel: Channel::Rot,
            axis: None,
        },
    }
}

/// Random finite state embedding for differential runs.
pub fn random_embed(spec: &EnvSpec, rng: &mut ChaCha8Rng) -> StateEmbed {
    let joints = (0..spec.num_joints())
        .map(|_| {
            let q = Quat::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            JointState {
                pos: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                rot: if q.norm() < 1e-3 { Quat::IDENTITY } else { q.normalized() },
                vel: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                ang_vel: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            }
        })
        .collect();
    StateEmbed { joints }
}

pub fn random_action(spec: &EnvSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..spec.action_dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Independent reference evaluator: naive recursion over the parsed AST with
/// name resolution through hash maps, no compilation step.
pub fn reference_eval(
    program: &RewardProgram,
    spec: &EnvSpec,
    embed: &StateEmbed,
    action: &[f64],
) -> Result<EvalResult, EvalError> {
    let mut env: HashMap<String, Value> = HashMap::new();
    let mut components = Vec::new();
    for (name, expr) in &program.bindings {
        let v = walk(expr, &env, spec, embed, action, name)?;
        let finite = match &v {
            Value::Scalar(s) => s.is_finite(),
            Value::Vec3(a) => a.iter().all(|x| x.is_finite()),
            Value::Vec4(a) => a.iter().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(EvalError::NonFinite(name.clone()));
        }
        if let Value::Scalar(s) = &v {
            components.push((name.clone(), *s));
        }
        env.insert(name.clone(), v);
    }
    let total = walk(&program.total, &env, spec, embed, action, "return")?;
    let Value::Scalar(t) = total else {
        panic!("reference evaluator: return expression was not scalar");
    };
    if !t.is_finite() {
        return Err(EvalError::NonFinite("return".to_string()));
    }
    Ok(EvalResult { total: t, components })
}

fn walk(
    expr: &Expr,
    env: &HashMap<String, Value>,
    spec: &EnvSpec,
    embed: &StateEmbed,
    action: &[f64],
    binding: &str,
) -> Result<Value, EvalError> {
    Ok(match &expr.kind {
        ExprKind::Lit(v) => Value::Scalar(*v),
        ExprKind::Name(n) => env.get(n).expect("unbound name in reference eval").clone(),
        ExprKind::Joint { joint, channel, axis } => {
            let j = spec
                .joint_index(joint)
                .expect("unknown joint in reference eval");
            let js = &embed.joints[j];
            let full: Vec<f64> = match channel {
                Channel::Pos => js.pos.to_vec(),
                Channel::Vel => js.vel.to_vec(),
                Channel::AngVel => js.ang_vel.to_vec(),
                Channel::Rot => vec![js.rot.x, js.rot.y, js.rot.z, js.rot.w],
            };
            match axis {
                Some(a) => Value::Scalar(full[a.index()]),
                None => {
                    if full.len() == 4 {
                        Value::Vec4([full[0], full[1], full[2], full[3]])
                    } else {
                        Value::Vec3([full[0], full[1], full[2]])
                    }
                }
            }
        }
        ExprKind::Action(i) => Value::Scalar(action[*i]),
        ExprKind::Neg(inner) => match walk(inner, env, spec, embed, action, binding)? {
            Value::Scalar(v) => Value::Scalar(-v),
            Value::Vec3(v) => Value::Vec3([-v[0], -v[1], -v[2]]),
            Value::Vec4(v) => Value::Vec4([-v[0], -v[1], -v[2], -v[3]]),
        },
        ExprKind::Bin(op, lhs, rhs) => {
            let l = walk(lhs, env, spec, embed, action, binding)?;
            let r = walk(rhs, env, spec, embed, action, binding)?;
            match (op, l, r) {
                (BinOp::Add, Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a + b),
                (BinOp::Add, Value::Vec3(a), Value::Vec3(b)) => {
                    Value::Vec3([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
                }
                (BinOp::Add, Value::Vec4(a), Value::Vec4(b)) => {
                    Value::Vec4([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
                }
                (BinOp::Sub, Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a - b),
                (BinOp::Sub, Value::Vec3(a), Value::Vec3(b)) => {
                    Value::Vec3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
                }
                (BinOp::Sub, Value::Vec4(a), Value::Vec4(b)) => {
                    Value::Vec4([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
                }
                (BinOp::Mul, Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
                (BinOp::Mul, Value::Scalar(s), Value::Vec3(v))
                | (BinOp::Mul, Value::Vec3(v), Value::Scalar(s)) => {
                    Value::Vec3([s * v[0], s * v[1], s * v[2]])
                }
                (BinOp::Mul, Value::Scalar(s), Value::Vec4(v))
                | (BinOp::Mul, Value::Vec4(v), Value::Scalar(s)) => {
                    Value::Vec4([s * v[0], s * v[1], s * v[2], s * v[3]])
                }
                (BinOp::Div, l, Value::Scalar(b)) => {
                    if b.abs() < crate::eval::DIV_GUARD {
                        return Err(EvalError::DivisionNearZero(binding.to_string()));
                    }
                    match l {
                        Value::Scalar(a) => Value::Scalar(a / b),
                        Value::Vec3(v) => Value::Vec3([v[0] / b, v[1] / b, v[2] / b]),
                        Value::Vec4(v) => Value::Vec4([v[0] / b, v[1] / b, v[2] / b, v[3] / b]),
                    }
                }
                _ => panic!("reference evaluator: ill-typed operation"),
            }
        }
        ExprKind::Call(func, args) => {
            let mut vals = Vec::new();
            for a in args {
                vals.push(walk(a, env, spec, embed, action, binding)?);
            }
            let s = |v: &Value| match v {
                Value::Scalar(x) => *x,
                _ => panic!("reference evaluator: expected scalar"),
            };
            let v3 = |v: &Value| match v {
                Value::Vec3(x) => *x,
                _ => panic!("reference evaluator: expected vec3"),
            };
            match func {
                Func::Exp => Value::Scalar(s(&vals[0]).exp()),
                Func::Abs => Value::Scalar(s(&vals[0]).abs()),
                Func::Norm => {
                    let v = v3(&vals[0]);
                    Value::Scalar((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
                }
                Func::Dot => {
                    let a = v3(&vals[0]);
                    let b = v3(&vals[1]);
                    Value::Scalar(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
                }
                Func::Min => Value::Scalar(s(&vals[0]).min(s(&vals[1]))),
                Func::Max => Value::Scalar(s(&vals[0]).max(s(&vals[1]))),
                Func::Clamp => {
                    Value::Scalar(s(&vals[0]).max(s(&vals[1])).min(s(&vals[2])))
                }
            }
        }
    })
}

/// Random well-formed-looking source text (for parser totality fuzzing).
pub fn random_source(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[&str] = &[
        "return", "exp", "norm", "dot", "min", "max", "clamp", "abs", "action", "pos", "rot",
        "vel", "angvel", "head", "pelvis", "x", "y", "z", "w", "b0", "(", ")", "[", "]", "+",
        "-", "*", "/", ".", ",", "=", "\n", " ", "1.0", "0.2", "3", "1e9", "1e999", "_",
    ];
    let len = rng.gen_range(0..40);
    let mut s = String::new();
    for _ in 0..len {
        s.push_str(ALPHABET[rng.gen_range(0..ALPHABET.len())]);
    }
    s
}


use crate::ast::{BinOp, Channel, DslError, ErrorKind, Expr, ExprKind, Func, RewardProgram};
use grove_env::EnvSpec;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Scalar,
    Vec3,
    Vec4,
}

impl Ty {
    fn name(&self) -> &'static str {
        match self {
            Ty::Scalar => "scalar",
            Ty::Vec3 => "vec3",
            Ty::Vec4 => "vec4",
        }
    }
}

/// Expression with joint and binding references resolved to indices.
#[derive(Clone, Debug)]
pub enum CExpr {
    Lit(f64),
    Slot(usize),
    JointVec3 { joint: usize, channel: Channel },
    JointVec4 { joint: usize },
    JointScalar { joint: usize, channel: Channel, axis: usize },
    Action(usize),
    Neg(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
    Call(Func, Vec<CExpr>),
}

#[derive(Clone, Debug)]
pub(crate) struct CBinding {
    pub name: String,
    pub ty: Ty,
    pub expr: CExpr,
}

/// A validated program, bound to one environment's joint and action layout.
#[derive(Clone, Debug)]
pub struct CompiledProgram {
    pub env_name: String,
    pub num_joints: usize,
    pub action_dim: usize,
    pub(crate) bindings: Vec<CBinding>,
    pub(crate) total: CExpr,
}

/// Type-checks `program` against `spec` and resolves all references.
pub fn validate(program: &RewardProgram, spec: &EnvSpec) -> Result<CompiledProgram, DslError> {
    let mut scope: HashMap<&str, (usize, Ty)> = HashMap::new();
    let mut bindings = Vec::with_capacity(program.bindings.len());
    for (slot, (name, expr)) in program.bindings.iter().enumerate() {
        if scope.contains_key(name.as_str()) {
            return Err(DslError::new(
                expr.pos,
                ErrorKind::Syntax,
                format!("binding `{name}` redefined"),
            ));
        }
        let (ty, compiled) = infer(expr, &scope, spec)?;
        scope.insert(name, (slot, ty));
        bindings.push(CBinding {
            name: name.clone(),
            ty,
            expr: compiled,
        });
    }
    let (total_ty, total) = infer(&program.total, &scope, spec)?;
    if total_ty != Ty::Scalar {
        return Err(DslError::new(
            program.total.pos,
            ErrorKind::TypeMismatch,
            format!("return expression must be scalar, found {}", total_ty.name()),
        ));
    }
    Ok(CompiledProgram {
        env_name: spec.name.to_string(),
        num_joints: spec.num_joints(),
        action_dim: spec.action_dim,
        bindings,
        total,
    })
}

fn infer(
    expr: &Expr,
    scope: &HashMap<&str, (usize, Ty)>,
    spec: &EnvSpec,
) -> Result<(Ty, CExpr), DslError> {
    match &expr.kind {
        ExprKind::Lit(v) => {
            if !v.is_finite() {
                return Err(DslError::new(
                    expr.pos,
                    ErrorKind::NonFiniteLiteral,
                    "literal is not finite",
                ));
            }
            Ok((Ty::Scalar, CExpr::Lit(*v)))
        }
        ExprKind::Name(name) => match scope.get(name.as_str()) {
            Some((slot, ty)) => Ok((*ty, CExpr::Slot(*slot))),
            None => Err(DslError::new(
                expr.pos,
                ErrorKind::UnknownIdentifier,
                format!("`{name}` is not a prior binding"),
            )),
        },
        ExprKind::Joint {
            joint,
            channel,
            axis,
        } => {
            let Some(j) = spec.joint_index(joint) else {
                return Err(DslError::new(
                    expr.pos,
                    ErrorKind::UnknownIdentifier,
                    format!("`{joint}` is not a joint of `{}`", spec.name),
                ));
            };
            let width = match channel {
                Channel::Rot => 4,
                _ => 3,
            };
            match axis {
                None => Ok(if *channel == Channel::Rot {
                    (Ty::Vec4, CExpr::JointVec4 { joint: j })
                } else {
                    (
                        Ty::Vec3,
                        CExpr::JointVec3 {
                            joint: j,
                            channel: *channel,
                        },
                    )
                }),
                Some(a) => {
                    if a.index() >= width {
                        return Err(DslError::new(
                            expr.pos,
                            ErrorKind::TypeMismatch,
                            format!(
                                "channel `{}` has no `{}` axis",
                                channel.as_str(),
                                a.as_str()
                            ),
                        ));
                    }
                    Ok((
                        Ty::Scalar,
                        CExpr::JointScalar {
                            joint: j,
                            channel: *channel,
                            axis: a.index(),
                        },
                    ))
                }
            }
        }
        ExprKind::Action(index) => {
            if *index >= spec.action_dim {
                return Err(DslError::new(
                    expr.pos,
                    ErrorKind::UnknownIdentifier,
                    format!(
                        "action[{index}] out of range for action_dim {}",
                        spec.action_dim
                    ),
                ));
            }
            Ok((Ty::Scalar, CExpr::Action(*index)))
        }
        ExprKind::Neg(inner) => {
            let (ty, c) = infer(inner, scope, spec)?;
            Ok((ty, CExpr::Neg(Box::new(c))))
        }
        ExprKind::Bin(op, lhs, rhs) => {
            let (lt, lc) = infer(lhs, scope, spec)?;
            let (rt, rc) = infer(rhs, scope, spec)?;
            let ty = match op {
                BinOp::Add | BinOp::Sub => {
                    if lt == rt {
                        lt
                    } else {
                        return Err(type_err(expr, op.symbol(), lt, rt));
                    }
                }
                BinOp::Mul => match (lt, rt) {
                    (Ty::Scalar, t) | (t, Ty::Scalar) => t,
                    _ => return Err(type_err(expr, op.symbol(), lt, rt)),
                },
                BinOp::Div => match (lt, rt) {
                    (t, Ty::Scalar) => t,
                    _ => return Err(type_err(expr, op.symbol(), lt, rt)),
                },
            };
            Ok((ty, CExpr::Bin(*op, Box::new(lc), Box::new(rc))))
        }
        ExprKind::Call(func, args) => {
            if args.len() != func.arity() {
                return Err(DslError::new(
                    expr.pos,
                    ErrorKind::TypeMismatch,
                    format!(
                        "`{}` takes {} argument(s), got {}",
                        func.name(),
                        func.arity(),
                        args.len()
                    ),
                ));
            }
            let mut compiled = Vec::with_capacity(args.len());
            let mut types = Vec::with_capacity(args.len());
            for a in args {
                let (t, c) = infer(a, scope, spec)?;
                types.push(t);
                compiled.push(c);
            }
            let ok = match func {
                Func::Exp | Func::Abs => types[0] == Ty::Scalar,
                Func::Norm => types[0] == Ty::Vec3,
                Func::Dot => types[0] == Ty::Vec3 && types[1] == Ty::Vec3,
                Func::Min | Func::Max => types.iter().all(|t| *t == Ty::Scalar),
                Func::Clamp => types.iter().all(|t| *t == Ty::Scalar),
            };
            if !ok {
                let got: Vec<&str> = types.iter().map(|t| t.name()).collect();
                return Err(DslError::new(
                    expr.pos,
                    ErrorKind::TypeMismatch,
                    format!("`{}` cannot take ({})", func.name(), got.join(", ")),
                ));
            }
            Ok((Ty::Scalar, CExpr::Call(*func, compiled)))
        }
    }
}

fn type_err(expr: &Expr, op: &str, lt: Ty, rt: Ty) -> DslError {
    DslError::new(
        expr.pos,
        ErrorKind::TypeMismatch,
        format!("`{op}` cannot combine {} and {}", lt.name(), rt.name()),
    )
}

impl CompiledProgram {
    /// Names of scalar-typed bindings, in program order; these populate the
    /// per-component map at evaluation time.
    pub fn component_names(&self) -> Vec<&str> {
        self.bindings
            .iter()
            .filter(|b| b.ty == Ty::Scalar)
            .map(|b| b.name.as_str())
            .collect()
    }
}

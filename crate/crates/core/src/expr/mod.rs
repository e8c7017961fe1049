//! User-written scalar fields: `x3 - atan2(x2, x1)`, `x1^2 + x2^2 - x3^2 - x4^2`.
//!
//! Variables are `x1, x2, …` (1-based). Exponents must be number literals;
//! there is no implicit multiplication. See [`parser`] for the grammar.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::fields::{FieldError, ScalarField, SINGULAR_MARGIN};
use crate::jets::Jet2;

pub mod parser;

pub use parser::{MAX_DEPTH, MAX_HEIGHT};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Self { offset, expected: expected.into(), found: found.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("dimension {given} is smaller than the largest variable index {required}")]
    Dimension { given: usize, required: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Atan2,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 8] =
        [Func::Sin, Func::Cos, Func::Tan, Func::Atan, Func::Atan2, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Atan2 => "atan2",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn arity(self) -> usize {
        if self == Func::Atan2 {
            2
        } else {
            1
        }
    }

    /// Partial on ℝ (or singular somewhere).
    pub fn is_partial(self) -> bool {
        matches!(self, Func::Tan | Func::Atan2 | Func::Log | Func::Sqrt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    /// 1-based variable index.
    Var(usize),
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    /// Base raised to a constant exponent.
    Pow(Box<Ast>, f64),
    Call(Func, Vec<Ast>),
}

impl Ast {
    /// Largest variable index, 0 for constants.
    pub fn max_var(&self) -> usize {
        match self {
            Ast::Num(_) => 0,
            Ast::Var(k) => *k,
            Ast::Neg(a) | Ast::Pow(a, _) => a.max_var(),
            Ast::Binary(_, a, b) => a.max_var().max(b.max_var()),
            Ast::Call(_, args) => args.iter().map(Ast::max_var).max().unwrap_or(0),
        }
    }

    /// Contains division, a non-integer or negative power, or a partial function.
    pub fn has_partial(&self) -> bool {
        match self {
            Ast::Num(_) | Ast::Var(_) => false,
            Ast::Neg(a) => a.has_partial(),
            Ast::Pow(a, e) => e.fract() != 0.0 || *e < 0.0 || a.has_partial(),
            Ast::Binary(op, a, b) => *op == BinOp::Div || a.has_partial() || b.has_partial(),
            Ast::Call(f, args) => f.is_partial() || args.iter().any(Ast::has_partial),
        }
    }

    /// Value and derivatives at `x`.
    pub fn jet(&self, x: &[f64]) -> Result<Jet2, FieldError> {
        let n = x.len();
        Ok(match self {
            Ast::Num(v) => Jet2::constant(n, *v),
            Ast::Var(k) => Jet2::variable(n, k - 1, *x.get(k - 1).unwrap_or(&f64::NAN))?,
            Ast::Neg(a) => -a.jet(x)?,
            Ast::Pow(a, e) => a.jet(x)?.powf(*e)?,
            Ast::Binary(op, a, b) => {
                let (a, b) = (a.jet(x)?, b.jet(x)?);
                match op {
                    BinOp::Add => a.try_add(&b)?,
                    BinOp::Sub => a.try_sub(&b)?,
                    BinOp::Mul => a.try_mul(&b)?,
                    BinOp::Div => a.try_div(&b)?,
                }
            }
            Ast::Call(f, args) => {
                let a = args[0].jet(x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan()?,
                    Func::Atan => a.atan(),
                    Func::Atan2 => Jet2::atan2(&a, &args[1].jet(x)?)?,
                    Func::Exp => a.exp(),
                    Func::Log => a.ln()?,
                    Func::Sqrt => a.sqrt()?,
                }
            }
        })
    }

    /// Plain value, or `None` within [`SINGULAR_MARGIN`] of a singular set.
    fn guarded_value(&self, x: &[f64]) -> Option<f64> {
        let v = match self {
            Ast::Num(v) => *v,
            Ast::Var(k) => *x.get(k - 1)?,
            Ast::Neg(a) => -a.guarded_value(x)?,
            Ast::Pow(a, e) => {
                let b = a.guarded_value(x)?;
                if e.fract() != 0.0 && b < SINGULAR_MARGIN || *e < 0.0 && b.abs() < SINGULAR_MARGIN {
                    return None;
                }
                b.powf(*e)
            }
            Ast::Binary(op, a, b) => {
                let (a, b) = (a.guarded_value(x)?, b.guarded_value(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b.abs() < SINGULAR_MARGIN => return None,
                    BinOp::Div => a / b,
                }
            }
            Ast::Call(f, args) => {
                let a = args[0].guarded_value(x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan if a.cos().abs() < SINGULAR_MARGIN => return None,
                    Func::Tan => a.tan(),
                    Func::Atan => a.atan(),
                    Func::Atan2 => {
                        let b = args[1].guarded_value(x)?;
                        if a.hypot(b) < SINGULAR_MARGIN {
                            return None;
                        }
                        a.atan2(b)
                    }
                    Func::Exp => a.exp(),
                    Func::Log | Func::Sqrt if a < SINGULAR_MARGIN => return None,
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                }
            }
        };
        v.is_finite().then_some(v)
    }
}

fn fmt_num(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{v}")
}

/// Fully parenthesised form that reparses to the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(v) => fmt_num(*v, f),
            Ast::Var(k) => write!(f, "x{k}"),
            Ast::Neg(a) => write!(f, "-({a})"),
            Ast::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Ast::Pow(a, e) => {
                match a.as_ref() {
                    Ast::Var(_) | Ast::Call(..) => write!(f, "{a}")?,
                    Ast::Num(v) => {
                        write!(f, "(")?;
                        fmt_num(*v, f)?;
                        write!(f, ")")?
                    }
                    _ => write!(f, "({a})")?,
                }
                write!(f, "^")?;
                fmt_num(*e, f)
            }
            Ast::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses `src`; the dimension is `dim` when given, otherwise the largest
/// variable index (at least 1).
pub fn parse(src: &str, dim: Option<usize>) -> Result<(Ast, usize), ExprError> {
    let ast = parser::parse_ast(src)?;
    let required = ast.max_var();
    let dim = match dim {
        Some(given) if given < required || given == 0 => return Err(ExprError::Dimension { given, required }),
        Some(given) => given,
        None => required.max(1),
    };
    Ok((ast, dim))
}

/// Field on ℝ^dim evaluating the expression over jets; the guard excludes
/// neighbourhoods of the singular sets of the partial operations.
pub fn to_field(ast: Ast, dim: usize) -> ScalarField {
    let name = format!("expr: {ast}");
    let partial = ast.has_partial();
    let ast = Arc::new(ast);
    let guard_ast = Arc::clone(&ast);
    ScalarField::new(dim, name, move |x| ast.jet(x))
        .with_guard(move |x| partial && guard_ast.guarded_value(x).is_none())
}

/// [`parse`] followed by [`to_field`].
pub fn parse_field(src: &str, dim: Option<usize>) -> Result<ScalarField, ExprError> {
    let (ast, dim) = parse(src, dim)?;
    Ok(to_field(ast, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{one_laplacian, ph_residual};
    use proptest::prelude::*;

    #[test]
    fn helicoid_expression() {
        let (ast, dim) = parse("x3 - atan2(x2, x1)", None).unwrap();
        assert_eq!(dim, 3);
        assert_eq!(
            ast,
            Ast::Binary(BinOp::Sub, Box::new(Ast::Var(3)), Box::new(Ast::Call(Func::Atan2, vec![Ast::Var(2), Ast::Var(1)])))
        );
        let f = to_field(ast, dim);
        let (a, b) = ph_residual(&f.eval(&[0.3, -1.2, 0.5]).unwrap());
        assert!(a < 1e-12 && b < 1e-12);
        assert!(f.is_guarded(&[0.0, 0.0, 1.0]));
        assert!(!f.is_guarded(&[1.0, 0.0, 1.0]));
    }

    #[test]
    fn cone_expression() {
        let (ast, dim) = parse("x1^2 + x2^2 - x3^2 - x4^2", None).unwrap();
        assert_eq!(dim, 4);
        let f = to_field(ast, dim);
        assert_eq!(f.value(&[1.0, 0.0, 1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn error_positions() {
        let e = parse("x1 +", None).unwrap_err();
        let ExprError::Parse(p) = e else { panic!() };
        assert_eq!(p.offset, 4);
        assert!(p.expected.contains("variable"));
        assert_eq!(p.found, "end of input");
        let ExprError::Parse(p) = parse("2x1", None).unwrap_err() else { panic!() };
        assert_eq!(p.offset, 1);
        let ExprError::Parse(p) = parse("x1 ^ x2", None).unwrap_err() else { panic!() };
        assert_eq!((p.offset, p.expected.as_str()), (5, "number literal exponent"));
        let ExprError::Parse(p) = parse("atan2(x1)", None).unwrap_err() else { panic!() };
        assert_eq!(p.offset, 8);
        let ExprError::Parse(p) = parse("x0", None).unwrap_err() else { panic!() };
        assert_eq!(p.offset, 0);
        assert!(parse("cosh(x1)", None).is_err());
        assert!(parse("1e999", None).is_err());
        assert!(parse("x1 # x2", None).is_err());
    }

    #[test]
    fn dimension_rules() {
        assert_eq!(parse("x2", Some(5)).unwrap().1, 5);
        assert_eq!(parse("3", None).unwrap().1, 1);
        assert_eq!(parse("x4", Some(2)).unwrap_err(), ExprError::Dimension { given: 2, required: 4 });
    }

    #[test]
    fn precedence() {
        let (a, _) = parse("-x1^2", None).unwrap();
        assert_eq!(a, Ast::Neg(Box::new(Ast::Pow(Box::new(Ast::Var(1)), 2.0))));
        let (a, _) = parse("x1 − x2 * x3", None).unwrap();
        let Ast::Binary(BinOp::Sub, _, rhs) = a else { panic!() };
        assert!(matches!(*rhs, Ast::Binary(BinOp::Mul, ..)));
        let (a, _) = parse("x1^-1.5", None).unwrap();
        assert_eq!(a, Ast::Pow(Box::new(Ast::Var(1)), -1.5));
    }

    #[test]
    fn product_matches_hsiang_d0_up_to_factor() {
        let f = parse_field("x1*x2*x3", None).unwrap();
        let raw = crate::jordan::hsiang_raw_field(0).unwrap();
        for x in [[1.0, 2.0, 3.0], [-0.3, 0.7, 1.1]] {
            let r = raw.value(&x).unwrap() / f.value(&x).unwrap();
            assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
        }
        assert_eq!(one_laplacian(&f.eval(&[1.0, 1.0, 1.0]).unwrap()), -6.0);
    }

    #[test]
    fn domain_violation_at_evaluation() {
        let f = parse_field("log(x1)", None).unwrap();
        assert!(f.eval(&[-1.0]).is_err());
        assert!(f.is_guarded(&[-1.0]));
        assert!(!f.is_guarded(&[1.0]));
    }

    #[test]
    fn deep_nesting_rejected_without_overflow() {
        let deep = "(".repeat(100_000) + "x1" + &")".repeat(100_000);
        assert!(parse(&deep, None).is_err());
        let long = vec!["x1"; 100_000].join("+");
        assert!(parse(&long, None).is_err());
        let negs = "-".repeat(100_000) + "x1";
        assert!(parse(&negs, None).is_err());
        let ok = "(".repeat(100) + "x1" + &")".repeat(100);
        assert!(parse(&ok, None).is_ok());
    }

    #[test]
    fn accepted_trees_reprint_within_limits() {
        for n in [MAX_HEIGHT - 1, MAX_HEIGHT, MAX_HEIGHT + 1, MAX_DEPTH] {
            let sources = [
                "-".repeat(n) + "x1",
                vec!["x1"; n].join("+"),
                vec!["x1"; n].join("*"),
                "sin(".repeat(n) + "x1" + &")".repeat(n),
                "(".repeat(n) + "x1" + &")".repeat(n),
            ];
            for src in sources {
                if let Ok((ast, _)) = parse(&src, None) {
                    let (back, _) = parse(&ast.to_string(), None).unwrap();
                    assert_eq!(back, ast);
                }
            }
        }
        assert!(parse(&("-".repeat(MAX_HEIGHT) + "x1"), None).is_err());
        assert!(parse(&("-".repeat(MAX_HEIGHT - 1) + "x1"), None).is_ok());
    }

    fn arb_ast(partial: bool) -> impl Strategy<Value = Ast> {
        let leaf = prop_oneof![
            (0u32..50).prop_map(|k| Ast::Num(f64::from(k) / 4.0)),
            (1usize..4).prop_map(Ast::Var),
        ];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let mut funcs = vec![Func::Sin, Func::Cos, Func::Atan, Func::Exp];
            if partial {
                funcs.extend([Func::Tan, Func::Log, Func::Sqrt]);
            }
            let mut ops = vec![BinOp::Add, BinOp::Sub, BinOp::Mul];
            if partial {
                ops.push(BinOp::Div);
            }
            prop_oneof![
                inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
                (proptest::sample::select(ops), inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| Ast::Binary(op, Box::new(a), Box::new(b))),
                (inner.clone(), 1u32..4).prop_map(|(a, e)| Ast::Pow(Box::new(a), f64::from(e))),
                (proptest::sample::select(funcs), inner.clone()).prop_map(|(f, a)| Ast::Call(f, vec![a])),
                (inner.clone(), inner).prop_map(move |(a, b)| if partial {
                    Ast::Call(Func::Atan2, vec![a, b])
                } else {
                    Ast::Binary(BinOp::Mul, Box::new(a), Box::new(b))
                }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pretty_print_round_trips(ast in arb_ast(true)) {
            let printed = ast.to_string();
            let (back, _) = parse(&printed, Some(3)).unwrap();
            prop_assert_eq!(back, ast);
        }

        #[test]
        fn parser_is_total(src in "\\PC{0,64}") {
            let _ = parse(&src, None);
        }

        #[test]
        fn parser_is_total_on_grammar_alphabet(src in "[x0-9+\\-*/^(),. a-z]{0,64}") {
            if let Err(ExprError::Parse(e)) = parse(&src, None) {
                prop_assert!(e.offset <= src.len());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn gradient_matches_finite_differences(ast in arb_ast(false).prop_filter("total", |a| !a.has_partial()),
                                              x in proptest::collection::vec(-1.0f64..1.0, 3)) {
            let Ok(j) = ast.jet(&x) else { return Ok(()) };
            if !j.is_finite() || j.hess_norm() > 1e6 {
                return Ok(());
            }
            let h = 1e-6;
            for i in 0..3 {
                let (mut a, mut b) = (x.clone(), x.clone());
                a[i] += h;
                b[i] -= h;
                let fd = (ast.jet(&a).unwrap().value() - ast.jet(&b).unwrap().value()) / (2.0 * h);
                let g = j.grad()[i];
                prop_assert!((fd - g).abs() <= 1e-6 * (1.0 + g.abs()), "i={} fd={} ad={}", i, fd, g);
            }
        }
    }
}

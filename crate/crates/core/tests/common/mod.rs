//! Random expression corpus with its own tree, printer and evaluator.
#![allow(dead_code)]

use rand::Rng;

#[derive(Debug, Clone)]
pub enum Gen {
    Num(f64),
    T,
    Pi,
    Z(usize, usize),
    Neg(Box<Gen>),
    Bin(char, Box<Gen>, Box<Gen>),
    F1(&'static str, Box<Gen>),
    F2(&'static str, Box<Gen>, Box<Gen>),
}

const F1: [&str; 6] = ["sin", "cos", "exp", "log", "abs", "sqrt"];
const F2: [&str; 2] = ["min", "max"];
const OPS: [char; 5] = ['+', '-', '*', '/', '^'];

pub fn generate(rng: &mut impl Rng, depth: u32) -> Gen {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..5) {
            0 => Gen::T,
            1 => Gen::Pi,
            2 => Gen::Z(rng.gen_range(1..=3), rng.gen_range(1..=2)),
            3 => Gen::Num(rng.gen_range(0..100) as f64 / 8.0),
            _ => Gen::Num(rng.gen_range(0.0..10.0)),
        };
    }
    match rng.gen_range(0..10) {
        0 => Gen::Neg(Box::new(generate(rng, depth - 1))),
        1 | 2 => Gen::F1(
            F1[rng.gen_range(0..F1.len())],
            Box::new(generate(rng, depth - 1)),
        ),
        3 => Gen::F2(
            F2[rng.gen_range(0..2)],
            Box::new(generate(rng, depth - 1)),
            Box::new(generate(rng, depth - 1)),
        ),
        _ => Gen::Bin(
            OPS[rng.gen_range(0..OPS.len())],
            Box::new(generate(rng, depth - 1)),
            Box::new(generate(rng, depth - 1)),
        ),
    }
}

/// Fully parenthesised text with random spacing.
pub fn print(g: &Gen, rng: &mut impl Rng) -> String {
    let sp = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { " " } else { "" };
    match g {
        Gen::Num(v) => format!("{v:?}"),
        Gen::T => "t".into(),
        Gen::Pi => "pi".into(),
        Gen::Z(b, c) => format!("z{b}_{c}"),
        Gen::Neg(e) => format!("-({})", print(e, rng)),
        Gen::Bin(op, l, r) => {
            let l = print(l, rng);
            let r = print(r, rng);
            let (a, b) = (sp(rng), sp(rng));
            format!("({l}){a}{op}{b}({r})")
        }
        Gen::F1(f, e) => format!("{f}({})", print(e, rng)),
        Gen::F2(f, a, b) => {
            let a = print(a, rng);
            let b = print(b, rng);
            let s = sp(rng);
            format!("{f}({a},{s}{b})")
        }
    }
}

/// `None` where evaluation must fail: a domain error or any non-finite intermediate.
pub fn reference_eval(g: &Gen, t: f64, z: &[f64], dim: usize) -> Option<f64> {
    let v = match g {
        Gen::Num(v) => *v,
        Gen::T => t,
        Gen::Pi => std::f64::consts::PI,
        Gen::Z(b, c) => *z.get((b - 1) * dim + c - 1)?,
        Gen::Neg(e) => -reference_eval(e, t, z, dim)?,
        Gen::Bin(op, l, r) => {
            let a = reference_eval(l, t, z, dim)?;
            let b = reference_eval(r, t, z, dim)?;
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                '/' => a / b,
                _ => a.powf(b),
            }
        }
        Gen::F1(f, e) => {
            let x = reference_eval(e, t, z, dim)?;
            match *f {
                "sin" => x.sin(),
                "cos" => x.cos(),
                "exp" => x.exp(),
                "log" if x > 0.0 => x.ln(),
                "abs" => x.abs(),
                "sqrt" if x >= 0.0 => x.sqrt(),
                _ => return None,
            }
        }
        Gen::F2(f, a, b) => {
            let a = reference_eval(a, t, z, dim)?;
            let b = reference_eval(b, t, z, dim)?;
            if *f == "min" {
                a.min(b)
            } else {
                a.max(b)
            }
        }
    };
    v.is_finite().then_some(v)
}

/// Error fixtures: source, expected `line:column` prefix of the diagnostic, a word it contains.
pub const ERROR_FIXTURES: &[(&str, &str, &str)] = &[
    ("", "1:1", "empty"),
    ("1 +", "1:4", "end of input"),
    ("(1 + 2", "1:1", "never closed"),
    ("1 + 2)", "1:6", ")"),
    ("foo(t)", "1:1", "unknown identifier"),
    ("sin(t, 1)", "1:1", "sin"),
    ("min(1)", "1:1", "min"),
    ("1 $ 2", "1:3", "$"),
    ("1..2", "1:1", "1..2"),
    ("2 * * 3", "1:5", "`*`"),
    ("sin t", "1:5", "("),
    ("t\n + )", "2:4", ")"),
    ("z0_1", "1:1", "z0_1"),
];

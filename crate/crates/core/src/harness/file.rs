//! JSON problem files.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dde::DelayedProblem;
use crate::expr::{parse, DomainBox, Expr};
use crate::functions::{ExprField, ExprVector, ScalarFn, VecFn};
use crate::reduction::{identity_delay, reduce, HigherOrderProblem};
use crate::{Error, Result};

/// A Lipschitz modulus given as a number or as an expression in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModulusSpec {
    Number(f64),
    Expr(String),
}

impl ModulusSpec {
    fn source(&self) -> String {
        match self {
            ModulusSpec::Number(v) => format!("{v:?}"),
            ModulusSpec::Expr(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub t0: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub delays: Vec<String>,
    pub rhs: Vec<String>,
    pub theta: Vec<String>,
    /// For `order > 1`: per component of `theta`, its derivatives `θ', …, θ^(order-1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_derivatives: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<ModulusSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_box: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_b: Option<Vec<String>>,
}

/// A problem file bound to solver objects.
#[derive(Clone)]
pub struct LoadedProblem {
    pub file: ProblemFile,
    /// The first-order problem; the reduced system when `order > 1`.
    pub problem: DelayedProblem,
    pub higher_order: Option<HigherOrderProblem>,
    pub perturbation: Option<VecFn>,
}

impl std::fmt::Debug for LoadedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoadedProblem")
            .field("file", &self.file)
            .field("problem", &self.problem)
            .field("higher_order", &self.higher_order)
            .field("perturbation", &self.perturbation.is_some())
            .finish()
    }
}

fn parse_at(path: String, src: &str) -> Result<Expr> {
    parse(src).map_err(|e| Error::schema(path, e))
}

fn parse_time_only(path: String, src: &str) -> Result<Expr> {
    let e = parse_at(path.clone(), src)?;
    e.check_symbols(0, 0)
        .map_err(|err| Error::schema(path, format!("{err}; only `t` may appear here")))?;
    Ok(e)
}

fn expect_len<T>(path: &str, items: &[T], want: usize, what: &str) -> Result<()> {
    if items.len() != want {
        return Err(Error::schema(
            path,
            format!("expected {want} entries ({what}), found {}", items.len()),
        ));
    }
    Ok(())
}

impl ProblemFile {
    /// Parses JSON, reporting the field path of the first violation.
    pub fn from_json(src: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(src);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(
                if path == "." {
                    "<root>".to_string()
                } else {
                    path
                },
                e.into_inner(),
            )
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(1)
    }

    /// Dimension of the first-order state: `n`, or the order for higher-order files.
    pub fn state_dim(&self) -> usize {
        if self.order() > 1 {
            self.order()
        } else {
            self.n
        }
    }

    fn check_shape(&self) -> Result<()> {
        let order = self.order();
        if self.n == 0 {
            return Err(Error::schema("n", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::schema("m", "must be at least 1"));
        }
        if order == 0 {
            return Err(Error::schema("order", "must be at least 1"));
        }
        if order > 1 && self.n != 1 {
            return Err(Error::schema("n", format!("higher-order files describe a scalar equation, so n must be 1 (order = {order})")));
        }
        expect_len("delays", &self.delays, self.m, "one per delay, m")?;
        expect_len("rhs", &self.rhs, self.n, "one per component, n")?;
        expect_len("theta", &self.theta, self.n, "one per component, n")?;
        match (&self.theta_derivatives, order) {
            (None, 1) => {}
            (Some(d), 1) if d.iter().all(|v| v.is_empty()) => {}
            (Some(_), 1) => {
                return Err(Error::schema(
                    "theta_derivatives",
                    "only allowed together with order > 1",
                ))
            }
            (None, _) => {
                return Err(Error::schema(
                    "theta_derivatives",
                    format!(
                        "order {order} needs the derivatives θ' … θ^({}) of theta",
                        order - 1
                    ),
                ))
            }
            (Some(d), _) => {
                expect_len("theta_derivatives", d, self.n, "one list per component, n")?;
                for (c, list) in d.iter().enumerate() {
                    expect_len(
                        &format!("theta_derivatives[{c}]"),
                        list,
                        order - 1,
                        "order - 1 derivatives",
                    )?;
                }
            }
        }
        let dim = self.state_dim();
        if let Some(b) = &self.domain_box {
            expect_len("domain_box", b, dim, "one [lo, hi] per state component")?;
        }
        if let Some(b) = &self.perturbation_b {
            expect_len("perturbation_b", b, dim, "one per state component")?;
        }
        Ok(())
    }

    fn modulus(&self) -> Result<Option<ScalarFn>> {
        Ok(match &self.lipschitz {
            None => None,
            Some(ModulusSpec::Number(v)) => {
                if !(*v >= 0.0) || !v.is_finite() {
                    return Err(Error::schema(
                        "lipschitz",
                        format!("must be finite and nonnegative, got {v}"),
                    ));
                }
                Some(crate::functions::constant(*v))
            }
            Some(ModulusSpec::Expr(s)) => Some(Arc::new(parse_time_only("lipschitz".into(), s)?)),
        })
    }

    fn domain(&self) -> Result<Option<DomainBox>> {
        self.domain_box
            .as_ref()
            .map(|b| {
                let (lo, hi) = b.iter().map(|[l, h]| (*l, *h)).unzip();
                DomainBox::new(lo, hi).map_err(|e| Error::schema("domain_box", e))
            })
            .transpose()
    }

    /// Validates every field and binds the expressions.
    pub fn load(&self) -> Result<LoadedProblem> {
        self.check_shape()?;
        let order = self.order();
        let delays: Vec<ScalarFn> = self
            .delays
            .iter()
            .enumerate()
            .map(|(j, s)| Ok(Arc::new(parse_time_only(format!("delays[{j}]"), s)?) as ScalarFn))
            .collect::<Result<_>>()?;
        let rhs: Vec<Expr> = self
            .rhs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let e = parse_at(format!("rhs[{i}]"), s)?;
                let block = if order > 1 { order } else { self.n };
                e.check_symbols(self.m, block)
                    .map_err(|err| Error::schema(format!("rhs[{i}]"), err))?;
                Ok(e)
            })
            .collect::<Result<_>>()?;
        let theta: Vec<Expr> = self
            .theta
            .iter()
            .enumerate()
            .map(|(i, s)| parse_time_only(format!("theta[{i}]"), s))
            .collect::<Result<_>>()?;
        let perturbation = self
            .perturbation_b
            .as_ref()
            .map(|b| {
                let exprs = b
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_time_only(format!("perturbation_b[{i}]"), s))
                    .collect::<Result<Vec<_>>>()?;
                Ok::<VecFn, Error>(Arc::new(ExprVector(exprs)))
            })
            .transpose()?;
        let lipschitz = self.modulus()?;
        let domain = self.domain()?;

        if order > 1 {
            let mut stack: Vec<ScalarFn> = vec![Arc::new(theta[0].clone())];
            for (j, s) in self.theta_derivatives.as_ref().expect("checked")[0]
                .iter()
                .enumerate()
            {
                stack.push(Arc::new(parse_time_only(
                    format!("theta_derivatives[0][{j}]"),
                    s,
                )?));
            }
            let field =
                ExprField::new(rhs, self.m, order).map_err(|e| Error::schema("rhs[0]", e))?;
            let mut hp = HigherOrderProblem::new(
                order,
                (self.gamma, self.t0, self.horizon),
                delays,
                Arc::new(field),
                stack,
            )?
            .with_name(self.name.clone());
            if let Some(k) = lipschitz {
                hp = hp.with_lipschitz(k);
            }
            if let Some(d) = domain {
                hp = hp.with_domain_box(d)?;
            }
            let problem = reduce(&hp)?;
            return Ok(LoadedProblem {
                file: self.clone(),
                problem,
                higher_order: Some(hp),
                perturbation,
            });
        }

        let field = ExprField::new(rhs, self.m, self.n).map_err(|e| Error::schema("rhs", e))?;
        let mut b = DelayedProblem::builder(self.gamma, self.t0, self.horizon)
            .name(self.name.clone())
            .delays(delays)
            .rhs(Arc::new(field))
            .theta(Arc::new(ExprVector(theta)));
        if let Some(k) = lipschitz {
            b = b.lipschitz(k);
        }
        if let Some(d) = domain {
            b = b.domain_box(d);
        }
        Ok(LoadedProblem {
            file: self.clone(),
            problem: b.build()?,
            higher_order: None,
            perturbation,
        })
    }

    /// The first-order problem file equivalent to a higher-order one; `self` when `order <= 1`.
    pub fn reduced(&self) -> Result<ProblemFile> {
        let order = self.order();
        if order == 1 {
            return Ok(self.clone());
        }
        let loaded = self.load()?;
        let hp = loaded.higher_order.as_ref().expect("order > 1");
        let mut delays = self.delays.clone();
        let identity = match identity_delay(hp)? {
            Some(j) => j,
            None => {
                delays.push("t".into());
                delays.len() - 1
            }
        };
        let mut rhs: Vec<String> = (2..=order)
            .map(|c| format!("z{}_{c}", identity + 1))
            .collect();
        rhs.push(self.rhs[0].clone());
        let mut theta = vec![self.theta[0].clone()];
        theta.extend(
            self.theta_derivatives.as_ref().expect("checked")[0]
                .iter()
                .cloned(),
        );
        Ok(ProblemFile {
            name: self.name.clone(),
            n: order,
            m: delays.len(),
            gamma: self.gamma,
            t0: self.t0,
            horizon: self.horizon,
            delays,
            rhs,
            theta,
            theta_derivatives: None,
            lipschitz: self
                .lipschitz
                .as_ref()
                .map(|k| ModulusSpec::Expr(format!("max(1, {})", k.source()))),
            order: None,
            domain_box: self.domain_box.clone(),
            perturbation_b: self.perturbation_b.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{solve, GridConfig};

    const DECAY: &str = r#"{
        "name": "decay", "n": 1, "m": 1, "gamma": -1, "t0": 0, "T": 2,
        "delays": ["t - 1"], "rhs": ["-z1_1"], "theta": ["1"], "lipschitz": 1
    }"#;

    fn schema_path(err: Error) -> String {
        match err {
            Error::Schema { path, .. } => path,
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn loads_and_solves() {
        let f = ProblemFile::from_json(DECAY).unwrap();
        let p = f.load().unwrap().problem;
        let x = solve(&p, &GridConfig::with_step(1e-3)).unwrap().trajectory;
        assert!((x.eval(2.0).unwrap()[0] + 0.5).abs() < 1e-10);
        assert_eq!(p.lipschitz().unwrap().eval(0.3).unwrap(), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let f = ProblemFile::from_json(DECAY).unwrap();
        assert_eq!(ProblemFile::from_json(&f.to_json().unwrap()).unwrap(), f);
    }

    #[test]
    fn field_paths_in_errors() {
        let bad_type = DECAY.replace("\"gamma\": -1", "\"gamma\": \"x\"");
        assert_eq!(
            schema_path(ProblemFile::from_json(&bad_type).unwrap_err()),
            "gamma"
        );

        let unknown = DECAY.replace("\"lipschitz\": 1", "\"lipschitz\": 1, \"extra\": 0");
        assert!(ProblemFile::from_json(&unknown).is_err());

        let bad_rhs = DECAY.replace("-z1_1", "-z1_1 +");
        let err = ProblemFile::from_json(&bad_rhs)
            .unwrap()
            .load()
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("rhs[0]: 1:"), "{msg}");

        let wrong_len = DECAY.replace("\"m\": 1", "\"m\": 2");
        assert_eq!(
            schema_path(
                ProblemFile::from_json(&wrong_len)
                    .unwrap()
                    .load()
                    .unwrap_err()
            ),
            "delays"
        );

        let state_in_theta = DECAY.replace("\"theta\": [\"1\"]", "\"theta\": [\"z1_1\"]");
        assert_eq!(
            schema_path(
                ProblemFile::from_json(&state_in_theta)
                    .unwrap()
                    .load()
                    .unwrap_err()
            ),
            "theta[0]"
        );

        let out_of_range = DECAY.replace("-z1_1", "-z2_1");
        assert_eq!(
            schema_path(
                ProblemFile::from_json(&out_of_range)
                    .unwrap()
                    .load()
                    .unwrap_err()
            ),
            "rhs[0]"
        );
    }

    #[test]
    fn delay_bound_violation_names_the_delay() {
        let ahead = DECAY.replace("t - 1", "t + 1");
        match ProblemFile::from_json(&ahead).unwrap().load().unwrap_err() {
            Error::DelayBound { j, t, value } => {
                assert_eq!(j, 1);
                assert!((value - t - 1.0).abs() < 1e-12);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn higher_order_reduction_file() {
        let src = r#"{
            "name": "h2", "n": 1, "m": 1, "gamma": -0.1, "t0": 0, "T": 1,
            "delays": ["t - 0.1"], "rhs": ["-z1_1"], "theta": ["sin(t)"],
            "theta_derivatives": [["cos(t)"]], "order": 2, "lipschitz": 1
        }"#;
        let f = ProblemFile::from_json(src).unwrap();
        let loaded = f.load().unwrap();
        assert_eq!(loaded.problem.dim(), 2);
        assert_eq!(loaded.problem.num_delays(), 2);
        let reduced = f.reduced().unwrap();
        assert_eq!(reduced.delays, vec!["t - 0.1".to_string(), "t".to_string()]);
        assert_eq!(reduced.rhs, vec!["z2_2".to_string(), "-z1_1".to_string()]);
        let direct = solve(&loaded.problem, &GridConfig::with_step(1e-2))
            .unwrap()
            .trajectory;
        let via_file = solve(
            &reduced.load().unwrap().problem,
            &GridConfig::with_step(1e-2),
        )
        .unwrap()
        .trajectory;
        assert_eq!(direct.eval(1.0).unwrap(), via_file.eval(1.0).unwrap());
        assert_eq!(
            reduced
                .load()
                .unwrap()
                .problem
                .lipschitz()
                .unwrap()
                .eval(0.0)
                .unwrap(),
            1.0
        );

        let missing = src.replace(r#""theta_derivatives": [["cos(t)"]], "#, "");
        assert_eq!(
            schema_path(
                ProblemFile::from_json(&missing)
                    .unwrap()
                    .load()
                    .unwrap_err()
            ),
            "theta_derivatives"
        );
    }
}

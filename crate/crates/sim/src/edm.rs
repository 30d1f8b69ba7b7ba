//! Packet-flow energy model: per-constituent packet-flow equations, the
//! linear overall-energy model on top of them, and least-squares fitting
//! of its coefficients from observed (flows, energy) pairs.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdmError {
    #[error("sensing probability must be < 1, got {0}")]
    DegenerateSense(f64),
    #[error("p_coll + p_ohear + p_idle must be < 1, got {0}")]
    DegenerateLocal(f64),
    #[error("packet-loss probability must be < 1, got {0}")]
    DegeneratePacketLoss(f64),
    #[error("need at least {need} observations to fit 6 coefficients, got {got}")]
    TooFewObservations { got: usize, need: usize },
    #[error("design matrix is rank deficient; dependent columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("flow table line {line}: expected 6 comma-separated values, got {got}")]
    MalformedRow { line: usize, got: usize },
    #[error("flow table line {line}: could not parse '{value}' as a number")]
    BadNumber { line: usize, value: String },
}

/// Inputs to the packet-flow equations: baseline packet counts per
/// activity plus the probabilities that inflate them through repetition
/// (re-sensing, collisions, overhearing, idle listening, packet loss).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdmFlowParams {
    pub b_os: f64,
    pub b_sec_ind: f64,
    pub p_sense: f64,
    pub b_sec_loc: f64,
    pub b_mon: f64,
    pub b_ohead_loc: f64,
    pub p_coll: f64,
    pub p_ohear: f64,
    pub p_idle: f64,
    pub b_sec_glob: f64,
    pub b_topo: f64,
    pub b_rout: f64,
    pub b_ohead_glob: f64,
    pub p_pktls: f64,
    pub b_sec_env: f64,
    pub b_ph: f64,
    pub b_sec_snk: f64,
    pub b_ohead_snk: f64,
}

impl EdmFlowParams {
    /// Packet flow attributed to the node's own operation: operating
    /// system and individual security traffic, inflated by re-sensing.
    pub fn flow_individual(&self) -> Result<f64, EdmError> {
        if self.p_sense >= 1.0 {
            return Err(EdmError::DegenerateSense(self.p_sense));
        }
        Ok((self.b_os + self.b_sec_ind) / (1.0 - self.p_sense))
    }

    /// Neighbourhood traffic (security, monitoring, local overhead),
    /// inflated by collisions, overhearing, and idle listening.
    pub fn flow_local(&self) -> Result<f64, EdmError> {
        let p = self.p_coll + self.p_ohear + self.p_idle;
        if p >= 1.0 {
            return Err(EdmError::DegenerateLocal(p));
        }
        Ok((self.b_sec_loc + self.b_mon + self.b_ohead_loc) / (1.0 - p))
    }

    /// Network-wide traffic (security, topology control, routing, global
    /// overhead), inflated by retransmissions after packet loss.
    pub fn flow_global(&self) -> Result<f64, EdmError> {
        if self.p_pktls >= 1.0 {
            return Err(EdmError::DegeneratePacketLoss(self.p_pktls));
        }
        Ok((self.b_sec_glob + self.b_topo + self.b_rout + self.b_ohead_glob) / (1.0 - self.p_pktls))
    }

    /// Physical-environment flow: sensing hardware plus its security
    /// traffic. No inflation term applies.
    pub fn flow_environment(&self) -> f64 {
        self.b_sec_env + self.b_ph
    }

    /// Sink-facing flow: security plus overhead packets exchanged with
    /// the sink. No inflation term applies.
    pub fn flow_sink(&self) -> f64 {
        self.b_sec_snk + self.b_ohead_snk
    }

    /// All five flows in ledger order, ready for [`EdmModel::predict`].
    pub fn flows(&self) -> Result<[f64; 5], EdmError> {
        Ok([
            self.flow_individual()?,
            self.flow_local()?,
            self.flow_global()?,
            self.flow_environment(),
            self.flow_sink(),
        ])
    }
}

pub const FLOW_COLUMN_NAMES: [&str; 6] = [
    "intercept",
    "b_individual",
    "b_local",
    "b_global",
    "b_environment",
    "b_sink",
];

/// Linear model mapping the five constituent flows to overall energy:
/// intercept plus one coefficient per flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdmModel {
    pub intercept: f64,
    /// One coefficient per flow, in the order individual, local, global,
    /// environment, sink.
    pub flow_coefficients: [f64; 5],
}

impl EdmModel {
    pub fn predict(&self, flows: &[f64; 5]) -> f64 {
        self.intercept
            + self
                .flow_coefficients
                .iter()
                .zip(flows)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }
}

/// Fits the six coefficients by ordinary least squares. Requires at least
/// 6 observations and a full-rank design (intercept column plus the five
/// flows); a rank-deficient design is rejected with the names of the
/// dependent columns.
pub fn edm_fit(observations: &[([f64; 5], f64)]) -> Result<EdmModel, EdmError> {
    let m = observations.len();
    if m < 6 {
        return Err(EdmError::TooFewObservations { got: m, need: 6 });
    }

    // Columns of the design matrix: intercept followed by the five flows.
    let mut cols: Vec<Vec<f64>> = (0..6)
        .map(|j| {
            observations
                .iter()
                .map(|(flows, _)| if j == 0 { 1.0 } else { flows[j - 1] })
                .collect()
        })
        .collect();
    let y: Vec<f64> = observations.iter().map(|&(_, e)| e).collect();

    // Thin QR by modified Gram-Schmidt with one reorthogonalization pass.
    // A column whose norm collapses relative to its original norm is
    // linearly dependent on the columns before it.
    let mut r = [[0.0f64; 6]; 6];
    let mut dependent = Vec::new();
    for j in 0..6 {
        let orig_norm = norm(&cols[j]);
        for _pass in 0..2 {
            for i in 0..j {
                if dependent.contains(&i) {
                    continue;
                }
                let (qi, vj) = borrow_two(&mut cols, i, j);
                let proj = dot(qi, vj);
                r[i][j] += proj;
                for (v, q) in vj.iter_mut().zip(qi) {
                    *v -= proj * q;
                }
            }
        }
        let nj = norm(&cols[j]);
        if nj <= 1e-10 * orig_norm.max(f64::MIN_POSITIVE) {
            dependent.push(j);
            r[j][j] = 0.0;
        } else {
            r[j][j] = nj;
            for v in &mut cols[j] {
                *v /= nj;
            }
        }
    }
    if !dependent.is_empty() {
        return Err(EdmError::RankDeficient {
            columns: dependent
                .iter()
                .map(|&j| FLOW_COLUMN_NAMES[j].to_string())
                .collect(),
        });
    }

    // Solve R a = Qᵀy by back substitution.
    let qty: Vec<f64> = (0..6).map(|j| dot(&cols[j], &y)).collect();
    let mut a = [0.0f64; 6];
    for j in (0..6).rev() {
        let mut s = qty[j];
        for k in (j + 1)..6 {
            s -= r[j][k] * a[k];
        }
        a[j] = s / r[j][j];
    }

    Ok(EdmModel {
        intercept: a[0],
        flow_coefficients: [a[1], a[2], a[3], a[4], a[5]],
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Indexes two distinct columns mutably at once.
fn borrow_two(cols: &mut [Vec<f64>], i: usize, j: usize) -> (&[f64], &mut Vec<f64>) {
    assert!(i < j);
    let (lo, hi) = cols.split_at_mut(j);
    (&lo[i], &mut hi[0])
}

/// Serializes (flows, energy) rows as a delimited table with the header
/// `b_individual,b_local,b_global,b_environment,b_sink,e_overall`.
pub fn write_flow_table(rows: &[([f64; 5], f64)]) -> String {
    let mut out = String::from("b_individual,b_local,b_global,b_environment,b_sink,e_overall\n");
    for (flows, e) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            flows[0], flows[1], flows[2], flows[3], flows[4], e
        )
        .unwrap();
    }
    out
}

/// Parses the table format produced by [`write_flow_table`]. The header
/// line is recognised and skipped; blank lines are ignored.
pub fn parse_flow_table(text: &str) -> Result<Vec<([f64; 5], f64)>, EdmError> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("b_individual") || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(EdmError::MalformedRow {
                line: idx + 1,
                got: fields.len(),
            });
        }
        let mut vals = [0.0f64; 6];
        for (k, f) in fields.iter().enumerate() {
            vals[k] = f.trim().parse().map_err(|_| EdmError::BadNumber {
                line: idx + 1,
                value: f.trim().to_string(),
            })?;
        }
        rows.push(([vals[0], vals[1], vals[2], vals[3], vals[4]], vals[5]));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn individual_flow_inflates_by_sensing() {
        let p = EdmFlowParams {
            b_os: 10.0,
            b_sec_ind: 5.0,
            p_sense: 0.5,
            ..EdmFlowParams::default()
        };
        assert_eq!(p.flow_individual().unwrap(), 30.0);
        let flat = EdmFlowParams {
            b_os: 10.0,
            b_sec_ind: 5.0,
            ..EdmFlowParams::default()
        };
        assert_eq!(flat.flow_individual().unwrap(), 15.0);
        assert_eq!(EdmFlowParams::default().flow_individual().unwrap(), 0.0);
        let degenerate = EdmFlowParams {
            p_sense: 1.0,
            ..EdmFlowParams::default()
        };
        assert!(matches!(
            degenerate.flow_individual(),
            Err(EdmError::DegenerateSense(_))
        ));
    }

    #[test]
    fn local_flow_inflates_by_contention() {
        let p = EdmFlowParams {
            b_sec_loc: 4.0,
            b_mon: 3.0,
            b_ohead_loc: 3.0,
            p_coll: 0.2,
            p_ohear: 0.2,
            p_idle: 0.1,
            ..EdmFlowParams::default()
        };
        assert_eq!(p.flow_local().unwrap(), 20.0);
        let quiet = EdmFlowParams {
            b_mon: 7.0,
            ..EdmFlowParams::default()
        };
        assert_eq!(quiet.flow_local().unwrap(), 7.0);
        assert_eq!(EdmFlowParams::default().flow_local().unwrap(), 0.0);
        let degenerate = EdmFlowParams {
            p_coll: 0.5,
            p_ohear: 0.3,
            p_idle: 0.2,
            ..EdmFlowParams::default()
        };
        assert!(matches!(
            degenerate.flow_local(),
            Err(EdmError::DegenerateLocal(_))
        ));
    }

    #[test]
    fn global_flow_inflates_by_packet_loss() {
        let p = EdmFlowParams {
            b_sec_glob: 2.0,
            b_topo: 3.0,
            b_rout: 4.0,
            b_ohead_glob: 0.0,
            p_pktls: 0.1,
            ..EdmFlowParams::default()
        };
        assert!((p.flow_global().unwrap() - 10.0).abs() < 1e-12);
        let lossless = EdmFlowParams {
            b_rout: 6.0,
            ..EdmFlowParams::default()
        };
        assert_eq!(lossless.flow_global().unwrap(), 6.0);
        assert_eq!(EdmFlowParams::default().flow_global().unwrap(), 0.0);
        let degenerate = EdmFlowParams {
            p_pktls: 1.5,
            ..EdmFlowParams::default()
        };
        assert!(matches!(
            degenerate.flow_global(),
            Err(EdmError::DegeneratePacketLoss(_))
        ));
    }

    #[test]
    fn environment_and_sink_flows_are_plain_sums() {
        let p = EdmFlowParams {
            b_sec_env: 2.0,
            b_ph: 3.0,
            b_sec_snk: 1.0,
            b_ohead_snk: 4.0,
            ..EdmFlowParams::default()
        };
        assert_eq!(p.flow_environment(), 5.0);
        assert_eq!(p.flow_sink(), 5.0);
        assert_eq!(EdmFlowParams::default().flow_environment(), 0.0);
        assert_eq!(EdmFlowParams::default().flow_sink(), 0.0);
    }

    #[test]
    fn predict_is_affine_in_flows() {
        let unit = EdmModel {
            intercept: 1.0,
            flow_coefficients: [1.0; 5],
        };
        assert_eq!(unit.predict(&[0.0; 5]), 1.0);
        assert_eq!(unit.predict(&[2.0, 3.0, 4.0, 0.0, 0.0]), 10.0);
        let no_intercept = EdmModel {
            intercept: 0.0,
            flow_coefficients: [1.0, 2.0, 3.0, 4.0, 5.0],
        };
        let once = no_intercept.predict(&[1.0, 1.0, 1.0, 1.0, 1.0]);
        let twice = no_intercept.predict(&[2.0, 2.0, 2.0, 2.0, 2.0]);
        assert_eq!(twice, 2.0 * once);
    }

    /// Deterministic low-discrepancy-ish values for building full-rank
    /// synthetic designs without pulling in an RNG.
    fn synth(i: usize, j: usize) -> f64 {
        let x = ((i * 31 + j * 17 + 7) % 97) as f64;
        (x / 9.7).sin() * 10.0 + x * 0.3
    }

    #[test]
    fn fit_recovers_exact_coefficients() {
        let truth = EdmModel {
            intercept: 3.5,
            flow_coefficients: [1.25, -0.5, 2.0, 0.75, -1.5],
        };
        let obs: Vec<([f64; 5], f64)> = (0..24)
            .map(|i| {
                let flows = [
                    synth(i, 0),
                    synth(i, 1),
                    synth(i, 2),
                    synth(i, 3),
                    synth(i, 4),
                ];
                (flows, truth.predict(&flows))
            })
            .collect();
        let fitted = edm_fit(&obs).unwrap();
        assert!((fitted.intercept - truth.intercept).abs() <= 1e-8 * truth.intercept.abs());
        for k in 0..5 {
            let (got, want) = (fitted.flow_coefficients[k], truth.flow_coefficients[k]);
            assert!(
                (got - want).abs() <= 1e-8 * want.abs(),
                "coefficient {k}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn fit_residual_is_orthogonal_to_design() {
        let obs: Vec<([f64; 5], f64)> = (0..30)
            .map(|i| {
                let flows = [
                    synth(i, 0),
                    synth(i, 1),
                    synth(i, 2),
                    synth(i, 3),
                    synth(i, 4),
                ];
                // Non-linear target: the fit cannot be exact, so the
                // orthogonality check is doing real work.
                let e = 2.0 + flows[0] * 1.1 + flows[2] * flows[2] * 0.05;
                (flows, e)
            })
            .collect();
        let model = edm_fit(&obs).unwrap();
        let residuals: Vec<f64> = obs
            .iter()
            .map(|(flows, e)| e - model.predict(flows))
            .collect();
        let scale: f64 = obs.iter().map(|&(_, e)| e * e).sum::<f64>().sqrt();
        for j in 0..6 {
            let col: Vec<f64> = obs
                .iter()
                .map(|(flows, _)| if j == 0 { 1.0 } else { flows[j - 1] })
                .collect();
            let col_norm = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            let inner: f64 = residuals.iter().zip(&col).map(|(r, c)| r * c).sum();
            assert!(
                inner.abs() <= 1e-8 * scale * col_norm,
                "column {j} not orthogonal to residual: {inner}"
            );
        }
    }

    #[test]
    fn fit_beats_random_coefficient_vectors() {
        let obs: Vec<([f64; 5], f64)> = (0..20)
            .map(|i| {
                let flows = [
                    synth(i, 0),
                    synth(i, 1),
                    synth(i, 2),
                    synth(i, 3),
                    synth(i, 4),
                ];
                let e = 1.0 + flows[1] * 0.8 - flows[4] * 0.3 + synth(i, 5) * 0.01;
                (flows, e)
            })
            .collect();
        let model = edm_fit(&obs).unwrap();
        let rss = |m: &EdmModel| -> f64 {
            obs.iter()
                .map(|(flows, e)| {
                    let r = e - m.predict(flows);
                    r * r
                })
                .sum()
        };
        let best = rss(&model);
        for t in 0..200 {
            let mut rival = model;
            // Perturb one coefficient at a time over a log-spaced range.
            let delta = 10f64.powi((t as i32 % 9) - 6) * if t % 2 == 0 { 1.0 } else { -1.0 };
            if t % 3 == 0 {
                rival.intercept += delta;
            } else {
                rival.flow_coefficients[t % 5] += delta;
            }
            assert!(rss(&rival) >= best - 1e-12 * best.abs());
        }
    }

    #[test]
    fn fit_constant_target_on_centered_design() {
        // Flow columns sum to zero, so they are orthogonal to the
        // intercept column and the solution puts everything on it.
        let obs: Vec<([f64; 5], f64)> = (0..12)
            .map(|i| {
                let base = [
                    synth(i, 0),
                    synth(i, 1),
                    synth(i, 2),
                    synth(i, 3),
                    synth(i, 4),
                ];
                (base, 0.0)
            })
            .collect();
        let means: [f64; 5] = {
            let mut m = [0.0; 5];
            for (flows, _) in &obs {
                for k in 0..5 {
                    m[k] += flows[k];
                }
            }
            m.map(|s| s / obs.len() as f64)
        };
        let centered: Vec<([f64; 5], f64)> = obs
            .iter()
            .map(|(flows, _)| {
                let mut f = *flows;
                for k in 0..5 {
                    f[k] -= means[k];
                }
                (f, 42.0)
            })
            .collect();
        let model = edm_fit(&centered).unwrap();
        assert!((model.intercept - 42.0).abs() < 1e-9);
        for c in model.flow_coefficients {
            assert!(c.abs() < 1e-9, "expected zero coefficient, got {c}");
        }
    }

    #[test]
    fn fit_rejects_duplicate_columns() {
        let obs: Vec<([f64; 5], f64)> = (0..10)
            .map(|i| {
                let a = synth(i, 0);
                let b = synth(i, 1);
                // local duplicates individual exactly.
                ([a, a, b, synth(i, 3), synth(i, 4)], a + b)
            })
            .collect();
        match edm_fit(&obs) {
            Err(EdmError::RankDeficient { columns }) => {
                assert_eq!(columns, vec!["b_local".to_string()]);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn fit_needs_six_observations() {
        let obs = vec![([1.0, 2.0, 3.0, 4.0, 5.0], 6.0); 5];
        assert!(matches!(
            edm_fit(&obs),
            Err(EdmError::TooFewObservations { got: 5, need: 6 })
        ));
    }

    #[test]
    fn flow_table_round_trip() {
        let rows = vec![
            ([1.0, 2.5, 3.0, 0.0, 4.25], 120.5),
            ([0.0, 0.0, 0.0, 0.0, 0.0], 0.0),
        ];
        let text = write_flow_table(&rows);
        assert!(text.starts_with("b_individual,b_local,b_global,b_environment,b_sink,e_overall"));
        let parsed = parse_flow_table(&text).unwrap();
        assert_eq!(parsed, rows);
        assert!(matches!(
            parse_flow_table("1,2,3\n"),
            Err(EdmError::MalformedRow { line: 1, got: 3 })
        ));
        assert!(matches!(
            parse_flow_table("1,2,3,4,5,x\n"),
            Err(EdmError::BadNumber { line: 1, .. })
        ));
    }
}

//! Two-input, two-output bipartite correlation boxes and the CHSH value.
//!
//! Landmarks: local deterministic strategies reach 2, the singlet reaches
//! `2 sqrt 2`, and the PR box reaches the algebraic maximum 4 while still
//! being no-signaling.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numkit::tensor;
use crate::qmodel::fixtures::{bloch_instrument, singlet};
use crate::report::VerificationReport;

const TOL_NORM: f64 = 1e-12;

/// `p[a, b | x, y]`, stored as `p[x][y][a][b]`.
///
/// JSON form is the flat 16-entry array in `(x, y, a, b)` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CorrelationBox {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

impl CorrelationBox {
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for (x, row) in p.iter().enumerate() {
            for (y, table) in row.iter().enumerate() {
                let mut total = 0.0;
                for v in table.iter().flatten() {
                    if !v.is_finite() || *v < 0.0 {
                        return Err(Error::InvalidBox(format!(
                            "entry {v} for setting ({x},{y})"
                        )));
                    }
                    total += v;
                }
                if (total - 1.0).abs() > TOL_NORM {
                    return Err(Error::InvalidBox(format!(
                        "setting ({x},{y}) sums to {total}"
                    )));
                }
            }
        }
        Ok(CorrelationBox { p })
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (x, row) in p.iter_mut().enumerate() {
            for (y, table) in row.iter_mut().enumerate() {
                for (a, pa) in table.iter_mut().enumerate() {
                    for (b, v) in pa.iter_mut().enumerate() {
                        *v = f(a, b, x, y);
                    }
                }
            }
        }
        CorrelationBox::new(p)
    }

    /// `p[a, b | x, y]`.
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[x][y][a][b]
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, lambda: f64, other: &CorrelationBox) -> Result<CorrelationBox> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ScaleOutOfRange(lambda));
        }
        CorrelationBox::from_fn(|a, b, x, y| {
            lambda * self.get(a, b, x, y) + (1.0 - lambda) * other.get(a, b, x, y)
        })
    }

    /// `E_xy = sum (-1)^(a xor b) p[a, b | x, y]`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let t = &self.p[x][y];
        t[0][0] - t[0][1] - t[1][0] + t[1][1]
    }
}

impl From<CorrelationBox> for Vec<f64> {
    fn from(b: CorrelationBox) -> Vec<f64> {
        b.p.iter().flatten().flatten().flatten().copied().collect()
    }
}

impl TryFrom<Vec<f64>> for CorrelationBox {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<CorrelationBox> {
        if v.len() != 16 {
            return Err(Error::InvalidBox(format!(
                "expected 16 entries, got {}",
                v.len()
            )));
        }
        CorrelationBox::from_fn(|a, b, x, y| v[8 * x + 4 * y + 2 * a + b])
    }
}

/// Largest change of either party's marginal under a change of the other party's input.
pub fn signaling_defect(bx: &CorrelationBox) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        for fixed in 0..2 {
            let alice = |y: usize| bx.get(k, 0, fixed, y) + bx.get(k, 1, fixed, y);
            let bob = |x: usize| bx.get(0, k, x, fixed) + bx.get(1, k, x, fixed);
            worst = worst
                .max((alice(0) - alice(1)).abs())
                .max((bob(0) - bob(1)).abs());
        }
    }
    worst
}

pub fn is_nosignaling_box(bx: &CorrelationBox, tol: f64) -> bool {
    signaling_defect(bx) <= tol
}

/// `S = E_00 + E_01 + E_10 - E_11`.
pub fn chsh_value(bx: &CorrelationBox) -> f64 {
    bx.correlator(0, 0) + bx.correlator(0, 1) + bx.correlator(1, 0) - bx.correlator(1, 1)
}

/// `p = 1/2` when `a xor b = x y`, else 0.
pub fn pr_box() -> CorrelationBox {
    CorrelationBox::from_fn(|a, b, x, y| if (a ^ b) == (x & y) { 0.5 } else { 0.0 })
        .expect("PR box is normalized")
}

pub fn uniform_box() -> CorrelationBox {
    CorrelationBox::from_fn(|_, _, _, _| 0.25).expect("uniform box is normalized")
}

/// Alice's outcome copies Bob's input; Bob's outcome is uniform.
pub fn signaling_box() -> CorrelationBox {
    CorrelationBox::from_fn(|a, _, _, y| if a == y { 0.5 } else { 0.0 })
        .expect("signaling box is normalized")
}

/// Local deterministic strategy: `a = alice[x]`, `b = bob[y]`.
pub fn deterministic_box(alice: [usize; 2], bob: [usize; 2]) -> CorrelationBox {
    CorrelationBox::from_fn(|a, b, x, y| {
        if a == alice[x] && b == bob[y] {
            1.0
        } else {
            0.0
        }
    })
    .expect("deterministic box is normalized")
}

/// All 16 local deterministic strategies.
pub fn deterministic_strategies() -> Vec<CorrelationBox> {
    let fns = [[0, 0], [0, 1], [1, 0], [1, 1]];
    fns.iter()
        .flat_map(|fa| fns.iter().map(move |fb| deterministic_box(*fa, *fb)))
        .collect()
}

/// Largest CHSH value over the deterministic local strategies.
pub fn classical_chsh_max() -> f64 {
    deterministic_strategies()
        .iter()
        .map(chsh_value)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Statistics of projective measurements on the singlet.
///
/// `angles = [alice_0, alice_1, bob_0, bob_1]`; angle `t` measures
/// `cos(t) sigma_z + sin(t) sigma_x`, outcome 0 being the `+1` eigenvalue.
pub fn singlet_box(angles: [f64; 4]) -> CorrelationBox {
    let rho = singlet();
    let alice = [bloch_instrument(angles[0]), bloch_instrument(angles[1])];
    let bob = [bloch_instrument(angles[2]), bloch_instrument(angles[3])];
    let table = |a: usize, b: usize, x: usize, y: usize| {
        let pa = alice[x].outcomes()[a].k_operator();
        let pb = bob[y].outcomes()[b].k_operator();
        let joint = tensor(pa.matrix(), pb.matrix());
        (joint * rho.matrix()).trace().re
    };
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (x, row) in p.iter_mut().enumerate() {
        for (y, t) in row.iter_mut().enumerate() {
            for (a, pa) in t.iter_mut().enumerate() {
                for (b, v) in pa.iter_mut().enumerate() {
                    *v = table(a, b, x, y).max(0.0);
                }
            }
            let s: f64 = t.iter().flatten().sum();
            t.iter_mut().flatten().for_each(|v| *v /= s);
        }
    }
    CorrelationBox::new(p).expect("Born probabilities are normalized")
}

/// Angles reaching `S = 2 sqrt 2` on the singlet under this convention.
pub const OPTIMAL_ANGLES: [f64; 4] = [
    0.0,
    -std::f64::consts::FRAC_PI_2,
    3.0 * std::f64::consts::FRAC_PI_4,
    -3.0 * std::f64::consts::FRAC_PI_4,
];

/// Checks the three CHSH landmarks and no-signaling of the PR and singlet boxes.
pub fn boxworld_suite(tol: f64) -> VerificationReport {
    let classical = classical_chsh_max();
    let pr = pr_box();
    let quantum = singlet_box(OPTIMAL_ANGLES);
    let tsirelson = 2.0 * 2f64.sqrt();
    let s_pr = chsh_value(&pr);
    let s_q = chsh_value(&quantum);
    let defects = [
        (classical - 2.0).abs(),
        (s_pr - 4.0).abs(),
        signaling_defect(&pr),
        signaling_defect(&quantum),
        (s_q - tsirelson).abs(),
    ];
    let worst = defects.iter().copied().fold(0.0, f64::max);
    VerificationReport::from_defect("boxworld", 0, 1, worst, tol).with_witness(json!({
        "classical_max": classical,
        "singlet_chsh": s_q,
        "tsirelson": tsirelson,
        "pr_chsh": s_pr,
        "pr_nosignaling": is_nosignaling_box(&pr, tol),
        "singlet_nosignaling": is_nosignaling_box(&quantum, tol),
    }))
}

/// No-signaling check of a single box.
pub fn box_nosig_report(name: &str, bx: &CorrelationBox, tol: f64) -> VerificationReport {
    VerificationReport::from_defect(
        format!("box-nosig[{name}]"),
        0,
        1,
        signaling_defect(bx),
        tol,
    )
    .with_witness(json!({ "chsh": chsh_value(bx), "table": Vec::<f64>::from(*bx) }))
}

//! Informational completeness, affine dimensions and local observability.
//!
//! An observable is informationally complete (IC) when its effects span the
//! effect space; it is minimal when they are also linearly independent. A
//! composite is locally observable when jointly measuring local IC observables
//! already gives an IC observable of the composite.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::json;

use crate::dsum::{DSumLocalOp, DSumModel};
use crate::error::{Error, Result};
use crate::numkit::{c, herm_sqrt, real_rank, span_rank, CMatrix, HermOp, Side, RANK_TOL};
use crate::opcore::classical::{ClassicalBipartite, ClassicalModel};
use crate::opcore::{Bipartite, ModelSampler, TheoryModel, TOL_FRAMEWORK};
use crate::qmodel::{QuantumBipartite, QuantumOp};
use crate::report::VerificationReport;
use crate::sampling::trial_rng;

const AFFINE_SEED: u64 = 0x00af_f17e;
const EXTRA_SAMPLES: usize = 4;

/// A complete set of effects of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<E> {
    effects: Vec<E>,
}

impl<E: Clone> Observable<E> {
    pub fn new<M: TheoryModel<Effect = E>>(model: &M, effects: Vec<E>) -> Result<Self> {
        let first = effects.first().ok_or(Error::Empty("observable"))?;
        let sum = effects[1..]
            .iter()
            .fold(first.clone(), |acc, e| model.add_effects(&acc, e));
        let defect = model.effect_distance(&sum, &model.unit_effect());
        if defect.is_nan() || defect > TOL_FRAMEWORK {
            return Err(Error::IncompleteAction(defect));
        }
        Ok(Observable { effects })
    }

    pub fn effects(&self) -> &[E] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ICCertificate {
    pub outcomes: usize,
    pub rank: usize,
    pub effect_space_dim: usize,
    pub informationally_complete: bool,
    pub minimal: bool,
}

fn coords_of<M: TheoryModel>(model: &M, effects: &[M::Effect]) -> Result<Vec<Vec<f64>>> {
    effects
        .iter()
        .map(|e| model.effect_coords(e).ok_or(Error::NoDualCoordinates))
        .collect()
}

/// Rank of the effects of `obs` in the model's effect coordinates.
pub fn ic_rank<M: TheoryModel>(obs: &Observable<M::Effect>, model: &M) -> Result<ICCertificate> {
    let rank = real_rank(&coords_of(model, &obs.effects)?, RANK_TOL)?;
    let dim = model.effect_space_dim();
    let ic = rank == dim;
    Ok(ICCertificate {
        outcomes: obs.len(),
        rank,
        effect_space_dim: dim,
        informationally_complete: ic,
        minimal: ic && rank == obs.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub coefficients: Vec<f64>,
    /// Largest coordinate deviation of `sum_i c_i l_i` from the target.
    pub residual: f64,
}

/// Least-squares coefficients `c` with `l = sum_i c_i l_i`.
pub fn expand_in_ic<M: TheoryModel>(
    l: &M::Effect,
    obs: &Observable<M::Effect>,
    model: &M,
) -> Result<Expansion> {
    let cert = ic_rank(obs, model)?;
    if !cert.informationally_complete {
        return Err(Error::NotInformationallyComplete {
            rank: cert.rank,
            needed: cert.effect_space_dim,
        });
    }
    let cols = coords_of(model, &obs.effects)?;
    let target = model.effect_coords(l).ok_or(Error::NoDualCoordinates)?;
    let a = DMatrix::from_fn(target.len(), cols.len(), |i, j| cols[j][i]);
    let b = DVector::from_column_slice(&target);
    let x = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    Ok(Expansion {
        coefficients: x.iter().copied().collect(),
        residual,
    })
}

/// `(adm of normalized states, linear dimension of effects)`, both measured by
/// sampling: the first from differences of random normalized states, the
/// second from random effects plus the unit.
pub fn affine_dims<M: ModelSampler>(model: &M) -> Result<(usize, usize)> {
    let mut rng = trial_rng(AFFINE_SEED, 0);
    let width = model.state_coords(&model.random_state(&mut rng)).len();
    let n = width + EXTRA_SAMPLES;
    let states: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let s = model.random_state(&mut rng);
            let w = model.weight(&s);
            model.state_coords(&model.scale_state(1.0 / w, &s))
        })
        .collect();
    let diffs: Vec<Vec<f64>> = states[1..]
        .iter()
        .map(|s| s.iter().zip(&states[0]).map(|(a, b)| a - b).collect())
        .collect();
    let adm_states = real_rank(&diffs, RANK_TOL)?;

    let mut effects = vec![model.unit_effect()];
    effects.extend((0..n).map(|_| model.effect_of(&model.random_transform(&mut rng))));
    let adm_effects = match coords_of(model, &effects) {
        Ok(coords) => real_rank(&coords, RANK_TOL)?,
        Err(_) => real_rank(&states, RANK_TOL)?,
    };
    Ok((adm_states, adm_effects))
}

/// A composite whose sides come with built-in minimal IC observables,
/// given as complete local actions.
pub trait LocalTomography: Bipartite {
    fn local_effect_dims(&self) -> (usize, usize);
    fn minimal_ic_left(&self) -> Result<Vec<Self::LeftOp>>;
    fn minimal_ic_right(&self) -> Result<Vec<Self::RightOp>>;

    /// Dimension an IC observable of the composite has to reach.
    fn reference_effect_dim(&self) -> usize {
        self.joint().effect_space_dim()
    }
}

fn joint_effect<B: Bipartite>(
    bip: &B,
    a: &B::LeftOp,
    b: &B::RightOp,
) -> Result<<B::Joint as TheoryModel>::Effect> {
    let j = bip.joint();
    Ok(j.effect_of(&j.compose(&bip.embed_left(a)?, &bip.embed_right(b)?)))
}

/// All pairwise joint outcomes of two local observables, as an observable of the composite.
pub fn product_observable<B: Bipartite>(
    bip: &B,
    left: &[B::LeftOp],
    right: &[B::RightOp],
) -> Result<Observable<<B::Joint as TheoryModel>::Effect>> {
    let mut effects = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            effects.push(joint_effect(bip, a, b)?);
        }
    }
    Observable::new(bip.joint(), effects)
}

/// Rank of local effects as seen from the composite.
fn local_rank<B: Bipartite>(
    bip: &B,
    ops: Vec<<B::Joint as TheoryModel>::Transform>,
) -> Result<usize> {
    let j = bip.joint();
    let effects: Vec<_> = ops.iter().map(|t| j.effect_of(t)).collect();
    real_rank(&coords_of(j, &effects)?, RANK_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalCertificates {
    pub left: ICCertificate,
    pub right: ICCertificate,
}

type CertifiedLocals<B> = (
    LocalCertificates,
    Vec<<B as Bipartite>::LeftOp>,
    Vec<<B as Bipartite>::RightOp>,
);

fn local_certificates<B: LocalTomography>(bip: &B) -> Result<CertifiedLocals<B>> {
    let (dl, dr) = bip.local_effect_dims();
    let left = bip.minimal_ic_left()?;
    let right = bip.minimal_ic_right()?;
    let cert = |outcomes: usize, rank: usize, dim: usize| ICCertificate {
        outcomes,
        rank,
        effect_space_dim: dim,
        informationally_complete: rank == dim,
        minimal: rank == dim && rank == outcomes,
    };
    let lr = local_rank(
        bip,
        left.iter()
            .map(|a| bip.embed_left(a))
            .collect::<Result<_>>()?,
    )?;
    let rr = local_rank(
        bip,
        right
            .iter()
            .map(|b| bip.embed_right(b))
            .collect::<Result<_>>()?,
    )?;
    let certs = LocalCertificates {
        left: cert(left.len(), lr, dl),
        right: cert(right.len(), rr, dr),
    };
    if !certs.left.minimal || !certs.right.minimal {
        return Err(Error::InvalidArgument(format!(
            "built-in local observables are not minimal IC: {certs:?}"
        )));
    }
    Ok((certs, left, right))
}

/// Passes iff the joint measurement of the two minimal local IC observables
/// spans the composite's full effect space.
pub fn local_observability_audit<B: LocalTomography>(bip: &B) -> Result<VerificationReport> {
    let (locals, left, right) = local_certificates(bip)?;
    let joint = product_observable(bip, &left, &right)?;
    let rank = real_rank(&coords_of(bip.joint(), joint.effects())?, RANK_TOL)?;
    let needed = bip.reference_effect_dim();
    let gap = needed.abs_diff(rank) as f64;
    Ok(
        VerificationReport::from_defect(format!("lop[{}]", bip.joint().name()), 0, 1, gap, 0.0)
            .with_witness(json!({
                "rank": rank,
                "effect_space_dim": needed,
                "outcomes": joint.len(),
                "local": locals,
            })),
    )
}

/// Integer affine-dimension identity `adm12 = adm1 adm2 + adm1 + adm2`, plus the
/// outcome count `(adm1 + 1)(adm2 + 1)` of the joint local IC observable.
///
/// The report is flagged as an expected failure when the composite is not locally observable.
pub fn dimension_identity_check<B>(bip: &B) -> Result<VerificationReport>
where
    B: LocalTomography,
    B::Joint: ModelSampler,
{
    let audit = local_observability_audit(bip)?;
    let (locals, left, right) = local_certificates(bip)?;
    let adm1 = locals.left.rank - 1;
    let adm2 = locals.right.rank - 1;
    let (adm12, adm12_effects) = affine_dims(bip.joint())?;
    let formula = adm1 * adm2 + adm1 + adm2;
    let outcomes = product_observable(bip, &left, &right)?.len();
    let expected_outcomes = (adm1 + 1) * (adm2 + 1);
    let gap = adm12.abs_diff(formula) + outcomes.abs_diff(expected_outcomes);
    let report = VerificationReport::from_defect(
        format!("dimension-identity[{}]", bip.joint().name()),
        0,
        1,
        gap as f64,
        0.0,
    )
    .with_witness(json!({
        "adm_joint": adm12,
        "adm_joint_effects": adm12_effects,
        "adm_left": adm1,
        "adm_right": adm2,
        "formula": formula,
        "outcomes": outcomes,
        "expected_outcomes": expected_outcomes,
        "lop": audit.pass,
    }));
    Ok(if audit.pass {
        report
    } else {
        report.expecting_failure()
    })
}

/// Qubit SIC: `(I + s_k . sigma) / 4` over the vertices of a regular tetrahedron.
pub fn qubit_sic() -> Vec<HermOp> {
    let r = 1.0 / 3f64.sqrt();
    let verts = [[r, r, r], [r, -r, -r], [-r, r, -r], [-r, -r, r]];
    verts
        .iter()
        .map(|s| {
            let m = CMatrix::from_row_slice(
                2,
                2,
                &[
                    c((1.0 + s[2]) / 4.0, 0.0),
                    c(s[0] / 4.0, -s[1] / 4.0),
                    c(s[0] / 4.0, s[1] / 4.0),
                    c((1.0 - s[2]) / 4.0, 0.0),
                ],
            );
            HermOp::symmetrized(m)
        })
        .collect()
}

/// Qutrit SIC: Weyl-Heisenberg orbit of `(0, 1, -1)/sqrt(2)`, each projector divided by 3.
pub fn qutrit_sic() -> Vec<HermOp> {
    let w = 2.0 * std::f64::consts::PI / 3.0;
    let s = 1.0 / 2f64.sqrt();
    let fid = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)];
    let mut out = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            // (X^a Z^b psi)_j = omega^{b (j - a)} psi_{j - a}
            let v: Vec<_> = (0..3)
                .map(|j| {
                    let k = (j + 3 - a) % 3;
                    fid[k] * c((w * (b * k) as f64).cos(), (w * (b * k) as f64).sin())
                })
                .collect();
            let v = DVector::from_vec(v);
            out.push(HermOp::symmetrized(&v * v.adjoint() / c(3.0, 0.0)));
        }
    }
    out
}

/// Minimal IC POVM from `d^2` spanning rank-one projectors `P_k`,
/// made complete as `S^{-1/2} P_k S^{-1/2}` with `S = sum_k P_k`.
pub fn generic_minimal_ic(d: usize) -> Vec<HermOp> {
    let s = 1.0 / 2f64.sqrt();
    let mut vecs = Vec::with_capacity(d * d);
    for i in 0..d {
        vecs.push(DVector::from_fn(d, |k, _| {
            if k == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }));
    }
    for i in 0..d {
        for j in i + 1..d {
            for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
                let mut v = DVector::from_element(d, c(0.0, 0.0));
                v[i] = c(s, 0.0);
                v[j] = phase * s;
                vecs.push(v);
            }
        }
    }
    let projs: Vec<CMatrix> = vecs.iter().map(|v| v * v.adjoint()).collect();
    let total = HermOp::symmetrized(projs.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p));
    let inv_sqrt = herm_sqrt(&crate::numkit::herm_apply(&total, |x| 1.0 / x));
    projs
        .iter()
        .map(|p| HermOp::symmetrized(inv_sqrt.matrix() * p * inv_sqrt.matrix()))
        .collect()
}

/// Built-in minimal IC POVM on `C^d`, certified by its span rank.
pub fn quantum_minimal_ic(d: usize) -> Result<Vec<HermOp>> {
    let effects = match d {
        0 => return Err(Error::InvalidArgument("dimension 0".into())),
        2 => qubit_sic(),
        3 => qutrit_sic(),
        _ => generic_minimal_ic(d),
    };
    let rank = span_rank(&effects, RANK_TOL)?;
    if rank != d * d {
        return Err(Error::NotInformationallyComplete {
            rank,
            needed: d * d,
        });
    }
    Ok(effects)
}

/// Realizes each POVM element `E` by the single Kraus operator `sqrt(E)`.
pub fn povm_operations(effects: &[HermOp]) -> Result<Vec<QuantumOp>> {
    effects
        .iter()
        .map(|e| QuantumOp::new(vec![herm_sqrt(e).into_matrix()]))
        .collect()
}

fn classical_point_ops(m: &ClassicalModel) -> Vec<DMatrix<f64>> {
    m.point_observable()
        .into_iter()
        .map(|e| DMatrix::from_diagonal(&e))
        .collect()
}

/// Side of a direct-sum composite: `{(E_k / 2, p = 0)} + {(I / 2, p = 1)}`,
/// with `E_k` a minimal IC POVM on the block.
pub fn dsum_minimal_ic(side: Side, d: usize) -> Result<Vec<DSumLocalOp>> {
    let half = 0.5f64.sqrt();
    let mut ops: Vec<DSumLocalOp> = quantum_minimal_ic(d)?
        .iter()
        .map(|e| {
            let k = herm_sqrt(&e.scale(0.5)).into_matrix();
            DSumLocalOp::new(side, QuantumOp::new(vec![k])?, 0.0)
        })
        .collect::<Result<_>>()?;
    let id = CMatrix::identity(d, d) * c(half, 0.0);
    ops.push(DSumLocalOp::new(side, QuantumOp::new(vec![id])?, 1.0)?);
    Ok(ops)
}

impl LocalTomography for QuantumBipartite {
    fn local_effect_dims(&self) -> (usize, usize) {
        (
            self.left().effect_space_dim(),
            self.right().effect_space_dim(),
        )
    }

    fn minimal_ic_left(&self) -> Result<Vec<QuantumOp>> {
        povm_operations(&quantum_minimal_ic(self.dims().0)?)
    }

    fn minimal_ic_right(&self) -> Result<Vec<QuantumOp>> {
        povm_operations(&quantum_minimal_ic(self.dims().1)?)
    }
}

impl LocalTomography for ClassicalBipartite {
    fn local_effect_dims(&self) -> (usize, usize) {
        (
            self.left().effect_space_dim(),
            self.right().effect_space_dim(),
        )
    }

    fn minimal_ic_left(&self) -> Result<Vec<DMatrix<f64>>> {
        Ok(classical_point_ops(self.left()))
    }

    fn minimal_ic_right(&self) -> Result<Vec<DMatrix<f64>>> {
        Ok(classical_point_ops(self.right()))
    }
}

impl LocalTomography for DSumModel {
    /// A side's local state is fixed by `Tr[K rho_+]` and the weight of the other block.
    fn local_effect_dims(&self) -> (usize, usize) {
        let (d1, d2) = self.dims();
        (d1 * d1 + 1, d2 * d2 + 1)
    }

    fn minimal_ic_left(&self) -> Result<Vec<DSumLocalOp>> {
        dsum_minimal_ic(Side::One, self.dims().0)
    }

    fn minimal_ic_right(&self) -> Result<Vec<DSumLocalOp>> {
        dsum_minimal_ic(Side::Two, self.dims().1)
    }

    /// The composite lives on `H_1 (+) H_2`, whose effects span `(d1 + d2)^2` dimensions.
    fn reference_effect_dim(&self) -> usize {
        self.ambient_effect_dim()
    }
}

/// One row of the local-observability table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub model: String,
    pub adm_states: usize,
    pub adm_effects: usize,
    pub lop_rank: usize,
    pub lop_needed: usize,
    pub lop: bool,
    pub identity: bool,
    pub expected_lop: bool,
}

impl AuditRow {
    /// The row matches expectation: LOP and the identity hold exactly when expected.
    pub fn as_expected(&self) -> bool {
        self.lop == self.expected_lop && self.identity == self.expected_lop
    }
}

pub fn audit_row<B>(bip: &B, expected_lop: bool) -> Result<AuditRow>
where
    B: LocalTomography,
    B::Joint: ModelSampler,
{
    let lop = local_observability_audit(bip)?;
    let identity = dimension_identity_check(bip)?;
    let (adm_states, adm_effects) = affine_dims(bip.joint())?;
    let w = lop.witness.as_ref().expect("audit has a witness");
    Ok(AuditRow {
        model: bip.joint().name(),
        adm_states,
        adm_effects,
        lop_rank: w["rank"].as_u64().unwrap_or(0) as usize,
        lop_needed: w["effect_space_dim"].as_u64().unwrap_or(0) as usize,
        lop: lop.pass,
        identity: identity.pass,
        expected_lop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{basis_projector, pauli_x, pauli_y, pauli_z, projector};
    use crate::qmodel::QuantumModel;

    #[test]
    fn sic_gram_matrix_has_full_rank() {
        // independent check: Tr[E_i E_j] = (d delta_ij + 1) / (d^2 (d + 1)) for a SIC
        for (d, sic) in [(2usize, qubit_sic()), (3, qutrit_sic())] {
            let n = d * d;
            let df = d as f64;
            for i in 0..n {
                for j in 0..n {
                    let g = sic[i].trace_product(&sic[j]);
                    let want = if i == j {
                        1.0 / (df * df)
                    } else {
                        1.0 / (df * df * (df + 1.0))
                    };
                    assert!((g - want).abs() < 1e-12, "d={d} ({i},{j}) {g} vs {want}");
                }
            }
            let gram = DMatrix::from_fn(n, n, |i, j| sic[i].trace_product(&sic[j]));
            assert_eq!(gram.rank(1e-10), n);
        }
    }

    #[test]
    fn ic_rank_examples() {
        let q = QuantumModel::new(2).unwrap();
        let z = Observable::new(
            &q,
            vec![
                HermOp::symmetrized(basis_projector(2, 0)),
                HermOp::symmetrized(basis_projector(2, 1)),
            ],
        )
        .unwrap();
        let cert = ic_rank(&z, &q).unwrap();
        assert_eq!((cert.rank, cert.informationally_complete), (2, false));

        let sic = Observable::new(&q, qubit_sic()).unwrap();
        let cert = ic_rank(&sic, &q).unwrap();
        assert_eq!(cert.rank, 4);
        assert!(cert.informationally_complete && cert.minimal);

        let cl = ClassicalModel::new(5).unwrap();
        let pts = Observable::new(&cl, cl.point_observable()).unwrap();
        let cert = ic_rank(&pts, &cl).unwrap();
        assert_eq!(cert.rank, 5);
        assert!(cert.minimal);

        assert!(matches!(
            Observable::new(&q, vec![HermOp::symmetrized(basis_projector(2, 0))]),
            Err(Error::IncompleteAction(_))
        ));
    }

    #[test]
    fn builtin_ic_observables_are_minimal() {
        for d in 1..=5 {
            let q = QuantumModel::new(d).unwrap();
            let obs = Observable::new(&q, quantum_minimal_ic(d).unwrap()).unwrap();
            let cert = ic_rank(&obs, &q).unwrap();
            assert_eq!(obs.len(), d * d);
            assert!(cert.minimal, "d={d} {cert:?}");
        }
    }

    #[test]
    fn expansion_examples() {
        let q = QuantumModel::new(2).unwrap();
        let sic = Observable::new(&q, qubit_sic()).unwrap();
        let e = expand_in_ic(&sic.effects()[2], &sic, &q).unwrap();
        for (k, v) in e.coefficients.iter().enumerate() {
            assert!((v - if k == 2 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        let e = expand_in_ic(&HermOp::identity(2), &sic, &q).unwrap();
        for v in &e.coefficients {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let plus = nalgebra::DVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
        let e = expand_in_ic(&HermOp::symmetrized(projector(&plus)), &sic, &q).unwrap();
        assert!(e.residual <= 1e-10);

        let z = Observable::new(
            &q,
            vec![
                HermOp::symmetrized(basis_projector(2, 0)),
                HermOp::symmetrized(basis_projector(2, 1)),
            ],
        )
        .unwrap();
        assert_eq!(
            expand_in_ic(&HermOp::symmetrized(pauli_x()), &z, &q),
            Err(Error::NotInformationallyComplete { rank: 2, needed: 4 })
        );
        // Pauli expansion sanity: sigma_y is a real combination of SIC effects
        let e = expand_in_ic(&HermOp::symmetrized(pauli_y()), &sic, &q).unwrap();
        assert!(e.residual < 1e-12);
        let e = expand_in_ic(&HermOp::symmetrized(pauli_z()), &sic, &q).unwrap();
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn affine_dims_examples() {
        assert_eq!(affine_dims(&QuantumModel::new(2).unwrap()).unwrap(), (3, 4));
        assert_eq!(affine_dims(&QuantumModel::new(3).unwrap()).unwrap(), (8, 9));
        assert_eq!(
            affine_dims(&ClassicalModel::new(2).unwrap()).unwrap(),
            (1, 2)
        );
        assert_eq!(affine_dims(&QuantumModel::new(1).unwrap()).unwrap(), (0, 1));
        assert_eq!(affine_dims(&DSumModel::new(2, 2).unwrap()).unwrap(), (7, 8));
    }

    #[test]
    fn product_observable_examples() {
        let bip = QuantumBipartite::new(2, 2).unwrap();
        let id = QuantumOp::identity(2);
        let unit =
            product_observable(&bip, std::slice::from_ref(&id), std::slice::from_ref(&id)).unwrap();
        assert_eq!(unit.len(), 1);
        assert!(
            crate::numkit::max_abs_diff(unit.effects()[0].matrix(), &CMatrix::identity(4, 4))
                < 1e-14
        );

        let sic = povm_operations(&qubit_sic()).unwrap();
        let joint = product_observable(&bip, &sic, &sic).unwrap();
        assert_eq!(joint.len(), 16);

        let cb = ClassicalBipartite::new(2, 2).unwrap();
        let pts = classical_point_ops(cb.left());
        let joint = product_observable(&cb, &pts, &pts).unwrap();
        assert_eq!(joint.len(), 4);
        let cert = ic_rank(&joint, cb.joint()).unwrap();
        assert!(cert.minimal);
    }

    #[test]
    fn lop_audit_discriminates() {
        let r = local_observability_audit(&QuantumBipartite::new(2, 2).unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.witness.as_ref().unwrap()["rank"], 16);
        assert!(
            local_observability_audit(&ClassicalBipartite::new(2, 2).unwrap())
                .unwrap()
                .pass
        );

        for (d1, d2) in [(2, 2), (2, 3)] {
            let r = local_observability_audit(&DSumModel::new(d1, d2).unwrap()).unwrap();
            let w = r.witness.unwrap();
            assert!(!r.pass);
            assert_eq!(w["rank"], d1 * d1 + d2 * d2);
            assert_eq!(w["effect_space_dim"], (d1 + d2) * (d1 + d2));
            assert_eq!(w["outcomes"], (d1 * d1 + 1) * (d2 * d2 + 1));
        }
    }

    #[test]
    fn dimension_identity_examples() {
        for (d1, d2, adm) in [(2, 2, 15), (2, 3, 35), (1, 3, 8)] {
            let r = dimension_identity_check(&QuantumBipartite::new(d1, d2).unwrap()).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.witness.unwrap()["adm_joint"], adm);
        }
        let r = dimension_identity_check(&ClassicalBipartite::new(2, 2).unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.witness.unwrap()["adm_joint"], 3);

        let r = dimension_identity_check(&DSumModel::new(2, 2).unwrap()).unwrap();
        assert!(!r.pass && r.expected_failure && r.as_expected());
    }
}

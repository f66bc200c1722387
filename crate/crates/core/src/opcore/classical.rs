//! Classical probability theory as a [`TheoryModel`]: probability vectors,
//! substochastic matrices, and column-sum effects.

use nalgebra::{DMatrix, DVector};

use super::{Bipartite, BipartiteSampler, ModelSampler, TheoryModel};
use crate::error::{Error, Result};
use crate::numkit::check_same_dim;
use crate::sampling::{uniform, TrialRng};

const TOL_ENTRY: f64 = 1e-12;
const TOL_COLSUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalModel {
    n: usize,
}

impl ClassicalModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "classical model needs n >= 1".into(),
            ));
        }
        Ok(ClassicalModel { n })
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }

    pub fn point_mass(&self, k: usize) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| if i == k { 1.0 } else { 0.0 })
    }

    pub fn diagonal(&self, diag: &[f64]) -> Result<DMatrix<f64>> {
        check_same_dim(self.n, diag.len())?;
        Ok(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// The point observable `{e_k}`: deterministic readout of the outcome.
    pub fn point_observable(&self) -> Vec<DVector<f64>> {
        (0..self.n).map(|k| self.point_mass(k)).collect()
    }
}

fn column_sums(t: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(t.ncols(), |j, _| t.column(j).sum())
}

impl TheoryModel for ClassicalModel {
    type State = DVector<f64>;
    type Transform = DMatrix<f64>;
    type Effect = DVector<f64>;

    fn name(&self) -> String {
        format!("classical(n={})", self.n)
    }

    fn effect_space_dim(&self) -> usize {
        self.n
    }

    fn check_state(&self, s: &DVector<f64>) -> Result<()> {
        check_same_dim(self.n, s.len())?;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(v) = s.iter().copied().find(|&v| v < -TOL_ENTRY) {
            return Err(Error::NotPositive(v));
        }
        Ok(())
    }

    fn check_transform(&self, t: &DMatrix<f64>) -> Result<()> {
        if !t.is_square() {
            return Err(Error::NonSquare {
                rows: t.nrows(),
                cols: t.ncols(),
            });
        }
        check_same_dim(self.n, t.nrows())?;
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(v) = t.iter().copied().find(|&v| v < -TOL_ENTRY) {
            return Err(Error::NotPositive(v));
        }
        let excess = column_sums(t).max() - 1.0;
        if excess > TOL_COLSUM {
            return Err(Error::EffectExceedsUnit(excess));
        }
        Ok(())
    }

    fn apply(&self, t: &DMatrix<f64>, s: &DVector<f64>) -> DVector<f64> {
        t * s
    }

    fn combine_states(&self, a: f64, s1: &DVector<f64>, b: f64, s2: &DVector<f64>) -> DVector<f64> {
        s1 * a + s2 * b
    }

    fn state_coords(&self, s: &DVector<f64>) -> Vec<f64> {
        s.iter().copied().collect()
    }

    fn state_distance(&self, s1: &DVector<f64>, s2: &DVector<f64>) -> f64 {
        (s1 - s2).iter().map(|v| v.abs()).sum()
    }

    fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
    }

    fn compose(&self, first: &DMatrix<f64>, then: &DMatrix<f64>) -> DMatrix<f64> {
        then * first
    }

    fn add_transforms(&self, t1: &DMatrix<f64>, t2: &DMatrix<f64>) -> DMatrix<f64> {
        t1 + t2
    }

    fn scale_transform(&self, lambda: f64, t: &DMatrix<f64>) -> DMatrix<f64> {
        t * lambda
    }

    fn complement_transform(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        let rest = column_sums(t).map(|v| (1.0 - v).max(0.0));
        DMatrix::from_diagonal(&rest)
    }

    fn transform_distance(&self, t1: &DMatrix<f64>, t2: &DMatrix<f64>) -> f64 {
        (t1 - t2).amax()
    }

    fn effect_of(&self, t: &DMatrix<f64>) -> DVector<f64> {
        column_sums(t)
    }

    fn unit_effect(&self) -> DVector<f64> {
        DVector::from_element(self.n, 1.0)
    }

    fn evaluate(&self, e: &DVector<f64>, s: &DVector<f64>) -> f64 {
        e.dot(s)
    }

    fn add_effects(&self, e1: &DVector<f64>, e2: &DVector<f64>) -> DVector<f64> {
        e1 + e2
    }

    fn effect_distance(&self, e1: &DVector<f64>, e2: &DVector<f64>) -> f64 {
        (e1 - e2).amax()
    }

    fn effect_excess(&self, e: &DVector<f64>) -> f64 {
        e.max() - 1.0
    }

    fn effect_coords(&self, e: &DVector<f64>) -> Option<Vec<f64>> {
        Some(e.iter().copied().collect())
    }
}

impl ModelSampler for ClassicalModel {
    fn random_state(&self, rng: &mut TrialRng) -> DVector<f64> {
        // exponential weights give a uniform point on the simplex
        let v = DVector::from_fn(self.n, |_, _| -(1.0 - uniform(rng)).ln());
        let s = v.sum();
        v / s
    }

    fn random_transform(&self, rng: &mut TrialRng) -> DMatrix<f64> {
        let mut t = DMatrix::from_fn(self.n, self.n, |_, _| uniform(rng));
        for j in 0..self.n {
            let target = uniform(rng);
            let s = t.column(j).sum();
            t.column_mut(j).scale_mut(target / s);
        }
        t
    }

    fn random_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<DMatrix<f64>> {
        let outcomes = outcomes.clamp(1, super::MAX_OUTCOMES);
        let mut ts: Vec<DMatrix<f64>> = (0..outcomes)
            .map(|_| DMatrix::from_fn(self.n, self.n, |_, _| uniform(rng)))
            .collect();
        for j in 0..self.n {
            let s: f64 = ts.iter().map(|t| t.column(j).sum()).sum();
            for t in &mut ts {
                t.column_mut(j).scale_mut(1.0 / s);
            }
        }
        ts
    }
}

/// Two classical systems composed by the Kronecker product; joint index `i * n2 + k`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalBipartite {
    left: ClassicalModel,
    right: ClassicalModel,
    joint: ClassicalModel,
}

impl ClassicalBipartite {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        Ok(ClassicalBipartite {
            left: ClassicalModel::new(n1)?,
            right: ClassicalModel::new(n2)?,
            joint: ClassicalModel::new(n1 * n2)?,
        })
    }

    pub fn left(&self) -> &ClassicalModel {
        &self.left
    }

    pub fn right(&self) -> &ClassicalModel {
        &self.right
    }
}

impl Bipartite for ClassicalBipartite {
    type Joint = ClassicalModel;
    type LeftOp = DMatrix<f64>;
    type RightOp = DMatrix<f64>;

    fn joint(&self) -> &ClassicalModel {
        &self.joint
    }

    fn embed_left(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.left.check_transform(a)?;
        Ok(a.kronecker(&self.right.identity()))
    }

    fn embed_right(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.right.check_transform(b)?;
        Ok(self.left.identity().kronecker(b))
    }
}

impl BipartiteSampler for ClassicalBipartite {
    fn random_joint_state(&self, rng: &mut TrialRng) -> DVector<f64> {
        self.joint.random_state(rng)
    }

    fn random_left_op(&self, rng: &mut TrialRng) -> DMatrix<f64> {
        self.left.random_transform(rng)
    }

    fn random_right_op(&self, rng: &mut TrialRng) -> DMatrix<f64> {
        self.right.random_transform(rng)
    }

    fn random_left_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<DMatrix<f64>> {
        self.left.random_action(rng, outcomes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::*;
    use crate::sampling::trial_rng;

    fn bit() -> ClassicalModel {
        ClassicalModel::new(2).unwrap()
    }

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn m(rows: usize, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, rows, x)
    }

    #[test]
    fn prob_examples() {
        let b = bit();
        let t = b.diagonal(&[1., 0.]).unwrap();
        assert_eq!(prob(&b, &v(&[0.5, 0.5]), &t).unwrap(), 0.5);
        assert_eq!(prob(&b, &v(&[0.3, 0.7]), &b.identity()).unwrap(), 1.0);
        let t = b.diagonal(&[0.5, 0.25]).unwrap();
        assert!((prob(&b, &v(&[0.2, 0.8]), &t).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn prob_rejects_mismatched_dims() {
        let b = bit();
        let t = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            prob(&b, &v(&[0.5, 0.5]), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn condition_examples() {
        let b = bit();
        let c = condition(&b, &v(&[0.5, 0.5]), &b.diagonal(&[1., 0.]).unwrap()).unwrap();
        assert_eq!(c, v(&[1., 0.]));
        let w = v(&[0.2, 0.8]);
        assert_eq!(condition(&b, &w, &b.identity()).unwrap(), w);
        let c = condition(&b, &w, &b.diagonal(&[0.5, 0.25]).unwrap()).unwrap();
        assert!((c - v(&[1. / 3., 2. / 3.])).amax() < 1e-15);
        let err = condition(&b, &v(&[0., 1.]), &b.diagonal(&[1., 0.]).unwrap());
        assert!(matches!(err, Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn compose_examples() {
        let b = bit();
        let t = m(2, &[0.2, 0.5, 0.3, 0.1]);
        assert_eq!(compose(&b, &t, &b.identity()).unwrap(), t);
        assert_eq!(compose(&b, &b.identity(), &t).unwrap(), t);
        let c = compose(
            &b,
            &b.diagonal(&[1., 0.]).unwrap(),
            &b.diagonal(&[0.5, 1.]).unwrap(),
        )
        .unwrap();
        assert_eq!(c, b.diagonal(&[0.5, 0.]).unwrap());
    }

    #[test]
    fn add_coexistent_examples() {
        let b = bit();
        let s = add_coexistent(
            &b,
            &b.diagonal(&[1., 0.]).unwrap(),
            &b.diagonal(&[0., 1.]).unwrap(),
        )
        .unwrap();
        assert_eq!(b.effect_of(&s), b.unit_effect());
        let mut rng = trial_rng(5, 0);
        let (t, u) = (b.random_transform(&mut rng), b.random_transform(&mut rng));
        for lambda in [0.0, 0.3, 1.0] {
            let mix = add_coexistent(
                &b,
                &scale(&b, lambda, &t).unwrap(),
                &scale(&b, 1.0 - lambda, &u).unwrap(),
            );
            assert!(mix.is_ok());
        }
        let err = add_coexistent(
            &b,
            &b.diagonal(&[0.8, 0.]).unwrap(),
            &b.diagonal(&[0.5, 0.]).unwrap(),
        );
        match err {
            Err(Error::NotCoexistent(x)) => assert!((x - 0.3).abs() < 1e-12),
            other => panic!("expected NotCoexistent, got {other:?}"),
        }
    }

    #[test]
    fn scale_examples() {
        let b = bit();
        let t = m(2, &[0.2, 0.5, 0.3, 0.1]);
        assert_eq!(scale(&b, 1.0, &t).unwrap(), t);
        let zero = scale(&b, 0.0, &t).unwrap();
        assert_eq!(prob(&b, &v(&[0.4, 0.6]), &zero).unwrap(), 0.0);
        assert!(matches!(scale(&b, 1.5, &t), Err(Error::ScaleOutOfRange(_))));
        assert!(matches!(
            scale(&b, -0.1, &t),
            Err(Error::ScaleOutOfRange(_))
        ));
        let mut rng = trial_rng(9, 0);
        for _ in 0..20 {
            let w = b.random_state(&mut rng);
            let t = b.random_transform(&mut rng);
            let c1 = condition(&b, &w, &t).unwrap();
            let c2 = condition(&b, &w, &scale(&b, 0.3, &t).unwrap()).unwrap();
            assert!(b.state_distance(&c1, &c2) < 1e-12);
        }
    }

    #[test]
    fn total_and_complement_examples() {
        let b = bit();
        let id = Action::new(&b, vec![b.identity()]).unwrap();
        assert_eq!(
            b.effect_of(&total_of_action(&b, &id).unwrap()),
            b.unit_effect()
        );
        let proj = Action::new(
            &b,
            vec![
                b.diagonal(&[1., 0.]).unwrap(),
                b.diagonal(&[0., 1.]).unwrap(),
            ],
        )
        .unwrap();
        let tot = total_of_action(&b, &proj).unwrap();
        assert_eq!(prob(&b, &v(&[0.1, 0.9]), &tot).unwrap(), 1.0);
        assert!(matches!(
            Action::new(&b, vec![b.diagonal(&[1., 0.]).unwrap()]),
            Err(Error::IncompleteAction(_))
        ));

        let c = complement(&b, &b.identity()).unwrap();
        assert_eq!(b.effect_of(&c), v(&[0., 0.]));
        let c = complement(&b, &b.diagonal(&[0.3, 0.7]).unwrap()).unwrap();
        assert!((b.effect_of(&c) - v(&[0.7, 0.3])).amax() < 1e-15);
        let over = m(2, &[0.8, 0.0, 0.5, 0.0]);
        assert!(matches!(
            complement(&b, &over),
            Err(Error::EffectExceedsUnit(_))
        ));

        let mut rng = trial_rng(11, 0);
        let three = ClassicalModel::new(3).unwrap();
        for _ in 0..20 {
            let t = three.random_transform(&mut rng);
            let a = Action::new(&three, vec![t.clone(), complement(&three, &t).unwrap()]).unwrap();
            let tot = total_of_action(&three, &a).unwrap();
            let w = three.random_state(&mut rng);
            assert!((prob(&three, &w, &tot).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalence_examples() {
        let b = bit();
        let probes = vec![b.point_mass(0), b.point_mass(1)];
        let diag = b.diagonal(&[0.5, 0.5]).unwrap();
        let anti = m(2, &[0., 0.5, 0.5, 0.]);
        assert!(informationally_equivalent(&b, &diag, &diag, &probes).unwrap());
        assert!(informationally_equivalent(&b, &diag, &anti, &probes).unwrap());
        assert!(!informationally_equivalent(
            &b,
            &b.diagonal(&[1., 0.]).unwrap(),
            &b.diagonal(&[0., 1.]).unwrap(),
            &probes
        )
        .unwrap());

        assert!(
            dynamically_equivalent(&b, &diag, &scale(&b, 0.4, &diag).unwrap(), &probes).unwrap()
        );
        assert!(!dynamically_equivalent(&b, &diag, &anti, &probes).unwrap());
        assert!(dynamically_equivalent(&b, &b.identity(), &b.identity(), &probes).unwrap());
        assert!(matches!(
            dynamically_equivalent(&b, &diag, &anti, &probes[..1]),
            Err(Error::IndeterminateSpan { rank: 1, needed: 2 })
        ));
    }

    #[test]
    fn correlated_no_signaling_example() {
        let bip = ClassicalBipartite::new(2, 2).unwrap();
        let omega = v(&[0.5, 0., 0., 0.5]);
        let l = bip.left();
        let action = vec![
            l.diagonal(&[1., 0.]).unwrap(),
            l.diagonal(&[0., 1.]).unwrap(),
        ];
        let probes = vec![
            l.diagonal(&[1., 0.]).unwrap(),
            l.diagonal(&[0., 1.]).unwrap(),
            m(2, &[0.3, 0.6, 0.2, 0.1]),
        ];
        let r = no_signaling_check(&bip, &omega, &action, &probes, 1e-12).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_defect, 0.0);
        // marginal of side 2 stays (0.5, 0.5)
        let id = bip.joint().identity();
        let b0 = bip.embed_right(&l.diagonal(&[1., 0.]).unwrap()).unwrap();
        assert_eq!(joint_prob(&bip, &omega, &id, &b0).unwrap(), 0.5);

        let trivial = no_signaling_check(&bip, &omega, &[l.identity()], &probes, 1e-12).unwrap();
        assert_eq!(trivial.max_defect, 0.0);

        let incomplete = no_signaling_check(&bip, &omega, &action[..1], &probes, 1e-12);
        assert!(matches!(incomplete, Err(Error::IncompleteAction(_))));
    }

    #[test]
    fn determinism_equivalence_examples() {
        let bip = ClassicalBipartite::new(2, 2).unwrap();
        let omega = v(&[0.5, 0., 0., 0.5]);
        let l = bip.left();
        let p0 = l.diagonal(&[1., 0.]).unwrap();
        let p1 = l.diagonal(&[0., 1.]).unwrap();
        let probes = vec![p0.clone(), p1.clone()];

        let det =
            determinism_equivalence_check(&bip, &omega, &l.identity(), &probes, 1e-12).unwrap();
        assert!(det.pass);
        assert_eq!(det.max_defect, 0.0);
        let det = determinism_equivalence_check(
            &bip,
            &omega,
            &scale(l, 1.0, &l.identity()).unwrap(),
            &probes,
            1e-12,
        )
        .unwrap();
        assert!(det.pass);

        let sel = determinism_equivalence_check(&bip, &omega, &p0, &probes, 1e-12).unwrap();
        assert!(sel.pass);
        let w = sel.witness.unwrap();
        assert_eq!(w["omega_a_identity"], 0.5);
        assert_eq!(w["deterministic"], false);
        // probe p1 on side 2: Omega(A, B) = 0 while Omega(I, B) = 0.5
        assert_eq!(w["max_probe_defect"], 0.5);
    }
}

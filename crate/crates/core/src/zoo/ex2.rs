//! Spin-factor domains: `E` is the space of formal `k x 2` matrices whose
//! first column lies in `C` and second column in `C^q` (zeroed according to
//! `p`), `F` the formally self-adjoint `2 x 2` matrices with real diagonal
//! and off-diagonal in `C^q`, and `Omega` the rank-two cone
//! `{ a, c > 0, ac - |b|^2 > 0 }`.
//!
//! The form and the triangular action are
//!
//! ```text
//! Phi(rows (a_j, b_j)) = ( sum |a_j|^2, sum |b_j|^2, sum conj(a_j) b_j )
//! (a, b, c) . (a', c', b') = ( a' a^2 + c' |b|^2 + 2a Re<b, b'>,
//!                              c^2 c',
//!                              a c b' + c c' b )
//! ```
//!
//! with `F`-elements written as `(a, c, b)`. Equivariance
//! `t . Phi(zeta) = Phi(zeta t^*)` holds whenever `p <= 1`; for `p = 2` it
//! can fail (the failure is observable and recorded, not asserted).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::form::{Complex64, FormError, HermitianForm};
use crate::zoo::ZooError;

/// Sizes of a spin-factor domain: `k` rows, activity level `p` (1 or 2), and
/// off-diagonal dimension `q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinDomainSpec {
    k: usize,
    p: usize,
    q: usize,
}

/// An element of `E`: one `(a_j, b_j)` pair per row.
#[derive(Clone, Debug, PartialEq)]
pub struct EPoint {
    pub rows: Vec<SpinRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinRow {
    pub a: Complex64,
    pub b: Vec<Complex64>,
}

/// An element of `F`, the formal self-adjoint matrix `[[a, b], [conj b, c]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FPoint {
    pub a: f64,
    pub c: f64,
    pub b: Vec<Complex64>,
}

/// A triangular group element `[[a, b], [0, c]]` with `a, c > 0`.
#[derive(Clone, Debug)]
pub struct SpinTriangular {
    pub a: f64,
    pub c: f64,
    pub b: Vec<Complex64>,
}

impl SpinDomainSpec {
    pub fn new(k: usize, p: usize, q: usize) -> Result<Self, ZooError> {
        if k == 0 || q == 0 || p == 0 || p > 2 {
            return Err(ZooError::InvalidSizes {
                detail: format!("need k >= 1, q >= 1, p in {{1, 2}}; got k={k}, p={p}, q={q}"),
            });
        }
        Ok(Self { k, p, q })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Complex dimension of `E`.
    pub fn n(&self) -> usize {
        if self.p == 1 {
            self.k
        } else {
            self.k * (1 + self.q)
        }
    }

    /// Real dimension of `F`.
    pub fn m(&self) -> usize {
        2 + 2 * self.q
    }

    pub fn validate_zeta(&self, zeta: &EPoint) -> Result<(), ZooError> {
        if zeta.rows.len() != self.k {
            return Err(ZooError::ShapeMismatch {
                detail: format!("zeta has {} rows, expected {}", zeta.rows.len(), self.k),
            });
        }
        for (j, row) in zeta.rows.iter().enumerate() {
            if row.b.len() != self.q {
                return Err(ZooError::ShapeMismatch {
                    detail: format!("row {j} has b of length {}, expected {}", row.b.len(), self.q),
                });
            }
            if self.p == 1 && row.b.iter().any(|v| v.norm() > 0.0) {
                return Err(ZooError::ShapeMismatch {
                    detail: format!("row {j}: second column must vanish when p = 1"),
                });
            }
        }
        Ok(())
    }

    pub fn validate_f(&self, h: &FPoint) -> Result<(), ZooError> {
        if h.b.len() != self.q {
            return Err(ZooError::ShapeMismatch {
                detail: format!("h has b of length {}, expected {}", h.b.len(), self.q),
            });
        }
        Ok(())
    }

    /// `Phi(zeta) = (sum |a_j|^2, sum |b_j|^2, sum conj(a_j) b_j)`; lands in
    /// the closed cone by Cauchy-Schwarz.
    pub fn phi_diag(&self, zeta: &EPoint) -> Result<FPoint, ZooError> {
        self.validate_zeta(zeta)?;
        let mut a = 0.0;
        let mut c = 0.0;
        let mut b = vec![Complex64::new(0.0, 0.0); self.q];
        for row in &zeta.rows {
            a += row.a.norm_sqr();
            for (acc, v) in b.iter_mut().zip(&row.b) {
                c += v.norm_sqr();
                *acc += row.a.conj() * v;
            }
        }
        Ok(FPoint { a, c, b })
    }

    /// The congruence action of the triangular group on `F`.
    pub fn action(&self, t: &SpinTriangular, h: &FPoint) -> FPoint {
        assert_eq!(t.b.len(), self.q, "t has wrong off-diagonal dimension");
        assert_eq!(h.b.len(), self.q, "h has wrong off-diagonal dimension");
        let pair: f64 = t.b.iter().zip(&h.b).map(|(x, y)| (x * y.conj()).re).sum();
        let b_norm_sqr: f64 = t.b.iter().map(|v| v.norm_sqr()).sum();
        let a = h.a * t.a * t.a + h.c * b_norm_sqr + 2.0 * t.a * pair;
        let c = t.c * t.c * h.c;
        let b = t
            .b
            .iter()
            .zip(&h.b)
            .map(|(tb, hb)| tb * Complex64::new(t.c * h.c, 0.0) + hb * Complex64::new(t.a * t.c, 0.0))
            .collect();
        FPoint { a, c, b }
    }

    /// Group product read off the formal matrix product:
    /// `(a, b, c)(a', b', c') = (a a', a b' + c' b, c c')`.
    pub fn compose(&self, t: &SpinTriangular, t2: &SpinTriangular) -> SpinTriangular {
        SpinTriangular {
            a: t.a * t2.a,
            c: t.c * t2.c,
            b: t
                .b
                .iter()
                .zip(&t2.b)
                .map(|(b1, b2)| b2 * Complex64::new(t.a, 0.0) + b1 * Complex64::new(t2.c, 0.0))
                .collect(),
        }
    }

    pub fn identity_triangular(&self) -> SpinTriangular {
        SpinTriangular { a: 1.0, c: 1.0, b: vec![Complex64::new(0.0, 0.0); self.q] }
    }

    /// `zeta t^*`: rows `(a_j a + <b_j, b>, c b_j)`. Stays in `E` when
    /// `p = 2`, and also when `p = 1` (the second column is then zero).
    pub fn zeta_t_star(&self, zeta: &EPoint, t: &SpinTriangular) -> EPoint {
        let rows = zeta
            .rows
            .iter()
            .map(|row| {
                let pair: Complex64 = row.b.iter().zip(&t.b).map(|(x, y)| x * y.conj()).sum();
                SpinRow {
                    a: row.a * t.a + pair,
                    b: row.b.iter().map(|v| v * Complex64::new(t.c, 0.0)).collect(),
                }
            })
            .collect();
        EPoint { rows }
    }

    /// `max |t . Phi(zeta) - Phi(zeta t^*)|` over the coordinates of `F`.
    /// Zero (to rounding) when `p <= 1`; may be strictly positive for
    /// `p = 2` with `q >= 2`.
    pub fn equivariance_residual(
        &self,
        t: &SpinTriangular,
        zeta: &EPoint,
    ) -> Result<f64, ZooError> {
        let lhs = self.action(t, &self.phi_diag(zeta)?);
        let rhs = self.phi_diag(&self.zeta_t_star(zeta, t))?;
        let mut worst = (lhs.a - rhs.a).abs().max((lhs.c - rhs.c).abs());
        for (x, y) in lhs.b.iter().zip(&rhs.b) {
            worst = worst.max((x - y).norm());
        }
        Ok(worst)
    }

    /// A witness for the boundary-coverage claim: for `a > 0` and
    /// `|b|^2 = ac`, the element with single nonzero row
    /// `(sqrt(a), b / sqrt(a))` has `Phi = (a, c, b)` exactly. The
    /// degenerate case `a = 0, b = 0` uses `(0, sqrt(c) e_1)`.
    pub fn boundary_witness(
        &self,
        a: f64,
        c: f64,
        b: &[Complex64],
    ) -> Result<EPoint, ZooError> {
        if b.len() != self.q {
            return Err(ZooError::ShapeMismatch {
                detail: format!("b has length {}, expected {}", b.len(), self.q),
            });
        }
        if self.p != 2 {
            return Err(ZooError::Precondition {
                detail: "boundary witnesses require p = 2".into(),
            });
        }
        if a < 0.0 || c < 0.0 {
            return Err(ZooError::Precondition {
                detail: "witness requires a >= 0 and c >= 0".into(),
            });
        }
        let b_norm_sqr: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        if (b_norm_sqr - a * c).abs() > 1e-12 * (1.0 + a * c) {
            return Err(ZooError::Precondition {
                detail: format!("|b|^2 = {b_norm_sqr} differs from ac = {}", a * c),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut rows = vec![
            SpinRow { a: zero, b: vec![zero; self.q] };
            self.k
        ];
        if a > 0.0 {
            let s = a.sqrt();
            rows[0] = SpinRow {
                a: Complex64::new(s, 0.0),
                b: b.iter().map(|v| v / s).collect(),
            };
        } else {
            let mut col = vec![zero; self.q];
            col[0] = Complex64::new(c.sqrt(), 0.0);
            rows[0] = SpinRow { a: zero, b: col };
        }
        Ok(EPoint { rows })
    }

    /// Factors `h = t t^*` over the triangular group (`t . base = h`); the
    /// open-cone inverse of the orbit map.
    pub fn triangular_factor(&self, h: &FPoint) -> Result<SpinTriangular, ZooError> {
        self.validate_f(h)?;
        if h.c <= 0.0 {
            return Err(ZooError::NotPositiveDefinite { pivot: h.c, index: 1 });
        }
        let c = h.c.sqrt();
        let b: Vec<Complex64> = h.b.iter().map(|v| v / c).collect();
        let b_norm_sqr: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        let pivot = h.a - b_norm_sqr;
        if pivot <= 0.0 {
            return Err(ZooError::NotPositiveDefinite { pivot, index: 0 });
        }
        Ok(SpinTriangular { a: pivot.sqrt(), c, b })
    }

    /// Characters with the squared-diagonal normalisation, matching the
    /// matrix-domain convention.
    pub fn delta(&self, t: &SpinTriangular) -> [f64; 2] {
        [t.a * t.a, t.c * t.c]
    }

    pub fn delta_power(&self, t: &SpinTriangular, s: &[Complex64; 2]) -> Complex64 {
        let d = self.delta(t);
        ((s[0] * d[0].ln()) + (s[1] * d[1].ln())).exp()
    }

    pub fn delta_omega_power(
        &self,
        h: &FPoint,
        s: &[Complex64; 2],
    ) -> Result<Complex64, ZooError> {
        let t = self.triangular_factor(h)?;
        Ok(self.delta_power(&t, s))
    }

    pub fn omega_contains(&self, h: &FPoint) -> bool {
        let b_norm_sqr: f64 = h.b.iter().map(|v| v.norm_sqr()).sum();
        h.b.len() == self.q && h.a > 0.0 && h.c > 0.0 && h.a * h.c - b_norm_sqr > 0.0
    }

    pub fn base_point(&self) -> FPoint {
        FPoint { a: 1.0, c: 1.0, b: vec![Complex64::new(0.0, 0.0); self.q] }
    }

    /// Real coordinates of `F`: `(a, c, Re b_1, Im b_1, ..., Re b_q, Im b_q)`.
    pub fn f_coords(&self, h: &FPoint) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m());
        out.push(h.a);
        out.push(h.c);
        for v in &h.b {
            out.push(v.re);
            out.push(v.im);
        }
        out
    }

    pub fn f_from_coords(&self, coords: &[f64]) -> FPoint {
        assert_eq!(coords.len(), self.m(), "coordinate length must be m");
        let b = (0..self.q)
            .map(|i| Complex64::new(coords[2 + 2 * i], coords[3 + 2 * i]))
            .collect();
        FPoint { a: coords[0], c: coords[1], b }
    }

    /// Complex coordinates of `E`: per row, `a_j` then (for `p = 2`) the `q`
    /// components of `b_j`.
    pub fn zeta_from_coords(&self, coords: &[Complex64]) -> EPoint {
        assert_eq!(coords.len(), self.n(), "coordinate length must be n");
        let zero = Complex64::new(0.0, 0.0);
        let per_row = if self.p == 1 { 1 } else { 1 + self.q };
        let rows = (0..self.k)
            .map(|j| {
                let at = j * per_row;
                let b = if self.p == 1 {
                    vec![zero; self.q]
                } else {
                    coords[at + 1..at + 1 + self.q].to_vec()
                };
                SpinRow { a: coords[at], b }
            })
            .collect();
        EPoint { rows }
    }

    pub fn coords_from_zeta(&self, zeta: &EPoint) -> Result<Vec<Complex64>, ZooError> {
        self.validate_zeta(zeta)?;
        let mut out = Vec::with_capacity(self.n());
        for row in &zeta.rows {
            out.push(row.a);
            if self.p == 2 {
                out.extend_from_slice(&row.b);
            }
        }
        Ok(out)
    }

    /// The coefficient-matrix realisation on the coordinates of `E` and `F`.
    pub fn materialize(&self) -> Result<HermitianForm, FormError> {
        HermitianForm::from_diagonal_map(self.n(), self.m(), |coords| {
            let zeta = self.zeta_from_coords(coords);
            let phi = self.phi_diag(&zeta).expect("coordinates produce a valid element");
            self.f_coords(&phi)
        })
    }

    pub fn random_zeta<R: Rng>(&self, rng: &mut R) -> EPoint {
        let mut normal = || {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(0.7 * re, 0.7 * im)
        };
        let zero = Complex64::new(0.0, 0.0);
        let rows = (0..self.k)
            .map(|_| SpinRow {
                a: normal(),
                b: (0..self.q)
                    .map(|_| if self.p == 2 { normal() } else { zero })
                    .collect(),
            })
            .collect();
        EPoint { rows }
    }

    pub fn random_triangular<R: Rng>(&self, rng: &mut R) -> SpinTriangular {
        let ga: f64 = rng.sample(StandardNormal);
        let gc: f64 = rng.sample(StandardNormal);
        SpinTriangular {
            a: (0.3 * ga).exp(),
            c: (0.3 * gc).exp(),
            b: (0..self.q)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(0.4 * re, 0.4 * im)
                })
                .collect(),
        }
    }

    pub fn random_omega_interior<R: Rng>(&self, rng: &mut R) -> FPoint {
        let t = self.random_triangular(rng);
        self.action(&t, &self.base_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(k: usize, p: usize, q: usize) -> SpinDomainSpec {
        SpinDomainSpec::new(k, p, q).unwrap()
    }

    #[test]
    fn dimension_bookkeeping() {
        let s = spec(1, 2, 1);
        assert_eq!((s.n(), s.m()), (2, 4));
        let s = spec(3, 1, 2);
        assert_eq!((s.n(), s.m()), (3, 6));
        assert!(SpinDomainSpec::new(1, 3, 1).is_err());
        assert!(SpinDomainSpec::new(1, 2, 0).is_err());
    }

    #[test]
    fn phi_matches_hand_value() {
        let s = spec(1, 2, 1);
        let zeta = EPoint {
            rows: vec![SpinRow { a: c(1.0, 0.0), b: vec![c(0.0, 1.0)] }],
        };
        let phi = s.phi_diag(&zeta).unwrap();
        assert!((phi.a - 1.0).abs() < 1e-15);
        assert!((phi.c - 1.0).abs() < 1e-15);
        assert!((phi.b[0] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_lands_in_the_closed_cone() {
        let s = spec(3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let zeta = s.random_zeta(&mut rng);
            let phi = s.phi_diag(&zeta).unwrap();
            let b_norm_sqr: f64 = phi.b.iter().map(|v| v.norm_sqr()).sum();
            assert!(phi.a >= 0.0 && phi.c >= 0.0);
            assert!(phi.a * phi.c - b_norm_sqr >= -1e-12 * (1.0 + phi.a * phi.c));
        }
    }

    #[test]
    fn identity_acts_trivially() {
        let s = spec(2, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let h = s.random_omega_interior(&mut rng);
        let same = s.action(&s.identity_triangular(), &h);
        assert!((same.a - h.a).abs() < 1e-15 && (same.c - h.c).abs() < 1e-15);
    }

    #[test]
    fn action_is_a_group_action() {
        let s = spec(1, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let t1 = s.random_triangular(&mut rng);
            let t2 = s.random_triangular(&mut rng);
            let h = s.random_omega_interior(&mut rng);
            let lhs = s.action(&s.compose(&t1, &t2), &h);
            let rhs = s.action(&t1, &s.action(&t2, &h));
            assert!((lhs.a - rhs.a).abs() < 1e-11);
            assert!((lhs.c - rhs.c).abs() < 1e-11);
            for (x, y) in lhs.b.iter().zip(&rhs.b) {
                assert!((x - y).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn action_preserves_the_open_cone() {
        let s = spec(1, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let t = s.random_triangular(&mut rng);
            let h = s.random_omega_interior(&mut rng);
            assert!(s.omega_contains(&s.action(&t, &h)));
        }
    }

    #[test]
    fn equivariance_holds_for_p_one() {
        let s = spec(3, 1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..100 {
            let t = s.random_triangular(&mut rng);
            let zeta = s.random_zeta(&mut rng);
            assert!(s.equivariance_residual(&t, &zeta).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn equivariance_holds_for_p_two_with_one_dimensional_b() {
        // With q = 1 the spin domain coincides with the 2x2 complex matrix
        // domain, where equivariance is exact.
        let s = spec(2, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..100 {
            let t = s.random_triangular(&mut rng);
            let zeta = s.random_zeta(&mut rng);
            assert!(s.equivariance_residual(&t, &zeta).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn equivariance_fails_generically_for_p_two_with_wider_b() {
        let s = spec(1, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let mut failures = 0;
        for _ in 0..100 {
            let t = s.random_triangular(&mut rng);
            let zeta = s.random_zeta(&mut rng);
            if s.equivariance_residual(&t, &zeta).unwrap() > 1e-6 {
                failures += 1;
            }
        }
        assert!(failures > 50, "only {failures} failures observed");
    }

    #[test]
    fn boundary_witnesses_reproduce_their_targets() {
        let s = spec(1, 2, 1);
        for (a, cc, b) in [
            (1.0, 1.0, c(1.0, 0.0)),
            (4.0, 1.0, c(2.0, 0.0)),
            (1.0, 0.0, c(0.0, 0.0)),
        ] {
            let zeta = s.boundary_witness(a, cc, &[b]).unwrap();
            let phi = s.phi_diag(&zeta).unwrap();
            assert!((phi.a - a).abs() < 1e-10);
            assert!((phi.c - cc).abs() < 1e-10);
            assert!((phi.b[0] - b).norm() < 1e-10);
        }
        let zeta = s.boundary_witness(0.0, 2.0, &[c(0.0, 0.0)]).unwrap();
        let phi = s.phi_diag(&zeta).unwrap();
        assert!(phi.a == 0.0 && (phi.c - 2.0).abs() <= 1e-12);
        assert!(s.boundary_witness(1.0, 1.0, &[c(2.0, 0.0)]).is_err());
    }

    #[test]
    fn witness_values_from_hand_calculation() {
        let s = spec(1, 2, 1);
        let zeta = s.boundary_witness(4.0, 1.0, &[c(2.0, 0.0)]).unwrap();
        assert!((zeta.rows[0].a - c(2.0, 0.0)).norm() < 1e-15);
        assert!((zeta.rows[0].b[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn factorization_round_trips() {
        let s = spec(1, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..50 {
            let t = s.random_triangular(&mut rng);
            let h = s.action(&t, &s.base_point());
            let back = s.triangular_factor(&h).unwrap();
            assert!((back.a - t.a).abs() < 1e-10);
            assert!((back.c - t.c).abs() < 1e-10);
            for (x, y) in back.b.iter().zip(&t.b) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn factorization_rejects_boundary_points() {
        let s = spec(1, 2, 1);
        let h = FPoint { a: 1.0, c: 1.0, b: vec![c(1.0, 0.0)] };
        assert!(matches!(
            s.triangular_factor(&h),
            Err(ZooError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn power_function_cocycle() {
        let s = spec(1, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let sexp = [c(0.8, -0.1), c(1.5, 0.4)];
        for _ in 0..20 {
            let tp = s.random_triangular(&mut rng);
            let h = s.random_omega_interior(&mut rng);
            let lhs = s.delta_omega_power(&s.action(&tp, &h), &sexp).unwrap();
            let rhs = s.delta_power(&tp, &sexp) * s.delta_omega_power(&h, &sexp).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let s = spec(2, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let zeta = s.random_zeta(&mut rng);
        let coords = s.coords_from_zeta(&zeta).unwrap();
        assert_eq!(coords.len(), s.n());
        assert_eq!(s.zeta_from_coords(&coords), zeta);
        let h = s.random_omega_interior(&mut rng);
        let hc = s.f_coords(&h);
        assert_eq!(hc.len(), s.m());
        assert_eq!(s.f_from_coords(&hc), h);
    }

    #[test]
    fn materialized_form_matches_structured_diagonal() {
        let s = spec(1, 2, 1);
        let form = s.materialize().unwrap();
        assert_eq!((form.n(), form.m()), (2, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let zeta = s.random_zeta(&mut rng);
            let coords = s.coords_from_zeta(&zeta).unwrap();
            let via_matrix = form.diag(&coords);
            let structured = s.f_coords(&s.phi_diag(&zeta).unwrap());
            for (x, y) in via_matrix.iter().zip(&structured) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

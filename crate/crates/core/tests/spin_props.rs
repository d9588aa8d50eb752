use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use relepr::kinematics::WignerRotation;
use relepr::spin::*;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn unit() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter_map("zero", |v| {
            let v = Vector3::from(v);
            (v.norm() > 1e-3).then(|| v.normalize())
        })
}

fn rotation() -> impl Strategy<Value = WignerRotation> {
    (unit(), 0.0..std::f64::consts::PI).prop_map(|(axis, angle)| {
        WignerRotation::new(
            Rotation3::from_axis_angle(&Unit::new_unchecked(axis), angle).into_inner(),
            1e-12,
        )
        .unwrap()
    })
}

fn spin() -> impl Strategy<Value = Spin> {
    (1u32..=4).prop_map(Spin::from_twice)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotation_rep_conjugation(r in rotation(), n in unit(), s in spin()) {
        let rep = generators(s);
        let u = rep_of_rotation(&r, &rep);
        let id = CMatrix::identity(rep.dim(), rep.dim());
        prop_assert!(max_abs(&(&u * u.adjoint() - id)) < 1e-10);
        let lhs = &u * rep.dot(&n) * u.adjoint();
        prop_assert!(max_abs(&(lhs - rep.dot(&r.apply(&n)))) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rotation_rep_is_projective(r1 in rotation(), r2 in rotation(), s in spin()) {
        let rep = generators(s);
        let product = WignerRotation::new(r1.matrix() * r2.matrix(), 1e-10).unwrap();
        let u12 = rep_of_rotation(&product, &rep);
        let u1u2 = rep_of_rotation(&r1, &rep) * rep_of_rotation(&r2, &rep);
        let plus = max_abs(&(&u12 - &u1u2));
        let minus = max_abs(&(&u12 + &u1u2));
        if s.twice() % 2 == 0 {
            prop_assert!(plus < 1e-10);
        } else {
            prop_assert!(plus.min(minus) < 1e-10);
        }
    }

    #[test]
    fn eigenbasis_is_complete_orthogonal(n in unit(), s in spin()) {
        let rep = generators(s);
        let basis = eigenbasis(&n, &rep).unwrap();
        let ns = rep.dot(&n);
        let mut sum = CMatrix::zeros(rep.dim(), rep.dim());
        for (i, p) in basis.iter().enumerate() {
            prop_assert!(max_abs(&(&p.matrix * &p.matrix - &p.matrix)) < 1e-12);
            prop_assert!(max_abs(&(&p.matrix - p.matrix.adjoint())) < 1e-12);
            let eig = &ns * &p.matrix - &p.matrix * Complex64::from(p.eigenvalue);
            prop_assert!(max_abs(&eig) < 1e-12);
            for q in &basis[i + 1..] {
                prop_assert!(max_abs(&(&p.matrix * &q.matrix)) < 1e-12);
            }
            sum += &p.matrix;
        }
        prop_assert!(max_abs(&(sum - CMatrix::identity(rep.dim(), rep.dim()))) < 1e-12);
    }

    #[test]
    fn eigenbasis_is_rotated_z_basis(n in unit(), s in spin()) {
        let rep = generators(s);
        let z = Vector3::z();
        // the rotation carrying ẑ onto n⃗ about ẑ×n⃗
        let axis = z.cross(&n);
        let r = if axis.norm() < 1e-9 {
            Rotation3::from_axis_angle(&Vector3::x_axis(), if n.z > 0.0 { 0.0 } else { std::f64::consts::PI })
        } else {
            Rotation3::from_axis_angle(&Unit::new_normalize(axis), z.angle(&n))
        };
        let u = rep_of_rotation(&WignerRotation::new(r.into_inner(), 1e-12).unwrap(), &rep);
        let rotated = eigenbasis(&n, &rep).unwrap();
        for (pz, pn) in eigenbasis(&z, &rep).unwrap().iter().zip(&rotated) {
            let conj = &u * &pz.matrix * u.adjoint();
            prop_assert!(max_abs(&(conj - &pn.matrix)) < 1e-10);
        }
    }

    #[test]
    fn projection_spectrum(n in unit(), s in spin()) {
        let rep = generators(s);
        let mut eig: Vec<f64> = nalgebra::SymmetricEigen::new(spin_projection(&n, &rep).unwrap())
            .eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in eig.iter().zip(s.eigenvalues()) {
            prop_assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn singlet_is_rotation_invariant(r in rotation()) {
        let rep = generators(Spin::HALF);
        let u = rep_of_rotation(&r, &rep);
        let psi = singlet_amplitude().matrix;
        let rotated = &u * &psi * u.transpose();
        // U ψ Uᵀ = det(U) ψ
        prop_assert!(max_abs(&(rotated - &psi * u.determinant())) < 1e-12);
    }
}

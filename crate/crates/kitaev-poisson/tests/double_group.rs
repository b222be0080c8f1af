use kitaev_poisson::double_group::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sl2c() -> PoissonDouble<Sl2c> {
    PoissonDouble::new(Sl2c::new()).unwrap()
}

#[test]
fn abelian_r_is_identity_block() {
    let pd = PoissonDouble::new(AbelianDouble::new(2)).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i < 2 && j == i + 2 { 1.0 } else { 0.0 };
            assert_eq!(pd.r[(i, j)], want);
        }
    }
    assert_eq!(cybe_residual(&pd.group, &pd.r), 0.0);
}

#[test]
fn sl2c_r_solves_cybe_but_r_a_does_not() {
    let pd = sl2c();
    assert!(cybe_residual(&pd.group, &pd.r) < 1e-12);
    assert!(cybe_residual(&pd.group, &pd.r_a) > 1e-3);
}

#[test]
fn r_block_structure_is_exact() {
    let pd = sl2c();
    for i in 0..6 {
        for j in 0..6 {
            if !(i < 3 && j >= 3) {
                assert_eq!(pd.r[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn r_s_is_ad_invariant() {
    let pd = sl2c();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let g = pd.random(&mut rng, 1.5);
        let a = pd.adjoint(&g);
        assert!(max_abs(&(&a * &pd.r_s * a.transpose() - &pd.r_s)) < 1e-10);
    }
}

#[test]
fn bivectors_at_identity() {
    let pd = sl2c();
    let one = pd.identity();
    assert!(max_abs(&pd.w(&one)) < 1e-15);
    assert!(max_abs(&(pd.w_heisenberg(&one) + &pd.r_a * 2.0)) < 1e-15);
    assert!(max_abs(&pd.w_gstar(&one)) < 1e-15);
}

#[test]
fn bivectors_are_antisymmetric() {
    let pd = sl2c();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let g = pd.random(&mut rng, 1.0);
        for w in [pd.w(&g), pd.w_heisenberg(&g), pd.w_gstar(&g)] {
            assert!(max_abs(&(&w + w.transpose())) < 1e-10);
        }
    }
}

#[test]
fn subgroups_are_poisson_submanifolds() {
    let pd = sl2c();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let a = pd.random_plus(&mut rng, 1.0);
        let w = pd.w(&a);
        let x = pd.random_minus(&mut rng, 1.0);
        let wx = pd.w(&x);
        for i in 0..6 {
            for j in 0..6 {
                if i < 3 || j < 3 {
                    assert!(w[(i, j)].abs() < 1e-12, "plus {i}{j} {}", w[(i, j)]);
                }
                if i >= 3 || j >= 3 {
                    assert!(wx[(i, j)].abs() < 1e-12, "minus {i}{j} {}", wx[(i, j)]);
                }
            }
        }
    }
}

#[test]
fn adjoint_is_a_homomorphism() {
    let pd = sl2c();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let g = pd.random(&mut rng, 1.0);
        let h = pd.random(&mut rng, 1.0);
        let lhs = pd.adjoint(&pd.mul(&g, &h));
        let rhs = pd.adjoint(&g) * pd.adjoint(&h);
        assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }
    assert!(max_abs(&(pd.adjoint(&pd.identity()) - nalgebra::DMatrix::identity(6, 6))) == 0.0);
}

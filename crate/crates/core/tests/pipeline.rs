use std::sync::Arc;

use oapoly::algebra::{GroupAlgebra, MatrixAlgebra, SharedAlgebra};
use oapoly::canon::to_canonical_json;
use oapoly::fourier::AlgElement;
use oapoly::group::{builtin_by_name, validate_group, validate_irreps, GroupFile, Tolerances};
use oapoly::polynomials::{
    check_orthogonal_additivity, orthogonal_pairs, HomPoly, PairDomain, PairSuite, PolynomialFile,
};
use oapoly::represent::{
    block_power_trace, extract, fourier_trace_power_tensor, phi_matrix_algebra, prototypical, verify_representation,
    ExtractOptions, LinearMap, LinearMapFile,
};
use oapoly::rng::seeded;
use oapoly::{Complex64, Error};

#[test]
fn group_file_round_trip_preserves_validation() {
    for name in ["z6", "s4", "q8"] {
        let (_, r) = builtin_by_name(name).unwrap();
        let text = to_canonical_json(&GroupFile::from_registry(&r)).unwrap();
        let file: GroupFile = serde_json::from_str(&text).unwrap();
        let (g2, r2) = file.into_registry().unwrap();
        assert!(validate_group(&g2).is_valid());
        assert!(validate_irreps(&g2, &r2, &Tolerances::default()).unwrap().pass());
    }
}

#[test]
fn polynomial_file_to_extraction() {
    let (g, r) = builtin_by_name("s3").unwrap();
    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
    let tensor = fourier_trace_power_tensor(&r, 3).unwrap();
    let file = PolynomialFile::from_tensor(alg.descriptor(), &tensor);
    let text = to_canonical_json(&file).unwrap();
    let p = serde_json::from_str::<PolynomialFile>(&text)
        .unwrap()
        .into_poly(Arc::clone(&alg))
        .unwrap();

    let (phi, report) = extract(&p, &r, &ExtractOptions::new(11)).unwrap();
    assert!(report.pass && report.suites_agree);
    // P(f) = Σ_π tr(f̂(π)³), so Φ(h) = Σ_π tr(ĥ(π)) and Φ(1_t) = (1/|G|) Σ_π conj χ_π(t)
    let chars: Vec<Vec<Complex64>> = r.irreps().iter().map(|i| i.character()).collect();
    for t in 0..g.order() {
        let expected: Complex64 = chars.iter().map(|c| c[t].conj()).sum::<Complex64>() / g.order() as f64;
        assert!((phi.apply(&AlgElement::basis(&g, t).into_values())[0] - expected).norm() < 1e-12);
    }

    let map_text = to_canonical_json(&phi.to_file()).unwrap();
    let back = serde_json::from_str::<LinearMapFile>(&map_text)
        .unwrap()
        .into_map()
        .unwrap();
    assert_eq!(back.max_entry_diff(&phi), 0.0);
}

#[test]
fn weighted_block_traces_recover_weights() {
    let (g, r) = builtin_by_name("d4").unwrap();
    let w: Vec<Complex64> = (0..r.len()).map(|i| Complex64::new(i as f64 + 1.0, -0.5)).collect();
    let p = block_power_trace(&r, 2, w).unwrap();
    let (phi, report) = extract(&p, &r, &ExtractOptions::new(3)).unwrap();
    assert!(report.pass);
    let v = verify_representation(&p, &phi, 100, 9, 1e-9).unwrap();
    assert!(v.pass);
    assert_eq!(phi.codomain_dim(), 1);
    assert_eq!(g.order(), 8);
}

#[test]
fn matrix_algebra_path() {
    let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(2));
    let phi0 = LinearMap::random(&mut seeded(4), alg.descriptor(), 2);
    let p = prototypical(Arc::clone(&alg), 3, &phi0).unwrap();
    let phi = phi_matrix_algebra(&p).unwrap();
    assert!(phi.max_entry_diff(&phi0) < 1e-9);

    let pairs = orthogonal_pairs(PairDomain::Matrix(2), 60, 1, PairSuite::Full).unwrap();
    assert!(check_orthogonal_additivity(&p, &pairs, 1e-9).unwrap().passed());

    // det is 2-homogeneous on 2×2 matrices but not orthogonally additive
    let det = HomPoly::black_box(alg, 2, 1, |x| vec![x[0] * x[3] - x[1] * x[2]]).unwrap();
    assert!(!check_orthogonal_additivity(&det, &pairs, 1e-9).unwrap().passed());
    assert!(matches!(
        phi_matrix_algebra(&det),
        Err(Error::VerificationFailure { .. })
    ));
}

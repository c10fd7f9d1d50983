use std::path::PathBuf;

use approx::assert_relative_eq;
use inexact_krylov::dense::{cholesky, SymMatrix};
use inexact_krylov::problems::{
    estimate_spectrum, parse_matrix_market_str, read_matrix_market, write_matrix_market, MmFormat,
    MmSymmetry, QuadraticProblem,
};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

// Extreme eigenvalues from scipy.io.mmread + numpy.linalg.eigvalsh.
const FIXTURES: [(&str, usize, f64, f64); 4] = [
    ("nos4_like.mtx", 100, 5.666666666663187e-4, 0.85),
    ("bcsstm02_like.mtx", 66, 0.019318181818181818, 0.17),
    ("small_array.mtx", 4, 1.5921988421253896, 5.687972815674782),
    ("small_general.mtx", 5, 2.267949192431123, 5.732050807568877),
];

#[test]
fn headers_match_contents() {
    let nos4 = read_matrix_market(fixture("nos4_like.mtx")).unwrap();
    assert_eq!((nos4.format, nos4.symmetry), (MmFormat::Coordinate, MmSymmetry::Symmetric));
    assert_eq!((nos4.rows, nos4.cols, nos4.declared_entries), (100, 100, 347));
    assert_eq!(nos4.matrix.lower_nnz(), 347);

    let mass = read_matrix_market(fixture("bcsstm02_like.mtx")).unwrap();
    assert_eq!(mass.matrix.lower_nnz(), mass.declared_entries);
    for i in 0..66 {
        for j in 0..i {
            assert_eq!(mass.matrix.get(i, j), 0.0);
        }
    }

    let array = read_matrix_market(fixture("small_array.mtx")).unwrap();
    assert_eq!(array.format, MmFormat::Array);
    assert_eq!(array.declared_entries, 10);
    assert!(array.matrix.lower_nnz() <= 10);

    // general storage lists both triangles plus the diagonal once
    let general = read_matrix_market(fixture("small_general.mtx")).unwrap();
    assert_eq!(general.symmetry, MmSymmetry::General);
    assert_eq!(general.matrix.lower_nnz(), (general.declared_entries + 5) / 2);
    assert_eq!(general.matrix.get(0, 1), -1.0);
    assert_eq!(general.matrix.get(4, 4), 4.0);
}

#[test]
fn fixture_spectra_match_reference() {
    for (name, n, lo, hi) in FIXTURES {
        let mm = read_matrix_market(fixture(name)).unwrap();
        assert_eq!(mm.matrix.order(), n, "{name}");
        let chol = cholesky(&mm.matrix).unwrap();
        let est = estimate_spectrum(&mm.matrix, &chol, 1);
        assert_relative_eq!(est.lambda_min_est, lo, max_relative = 1e-6);
        assert_relative_eq!(est.lambda_max_est, hi, max_relative = 1e-6);
    }
}

#[test]
fn fixtures_define_problems() {
    for (name, n, _, _) in FIXTURES {
        let a = read_matrix_market(fixture(name)).unwrap().matrix;
        let p = QuadraticProblem::from_matrix(name, a, 3).unwrap();
        assert_eq!(p.order(), n);
        assert_relative_eq!(p.rhs().norm2(), 1.0, max_relative = 1e-14);
        assert!(p.q_star() < 0.0);
    }
}

#[test]
fn rejects_malformed_input() {
    let bad = [
        "",
        "%%MatrixMarket matrix coordinate complex symmetric\n1 1 1\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 2.0\n",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 abc\n",
    ];
    for text in bad {
        assert!(parse_matrix_market_str(text).is_err(), "{text:?}");
    }
    assert!(read_matrix_market(fixture("missing.mtx")).is_err());
}

proptest! {
    #[test]
    fn write_then_read_is_identity(
        n in 1usize..8,
        entries in proptest::collection::vec(-1e3f64..1e3, 64),
        zero_mask in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let a = SymMatrix::from_lower_fn(n, |i, j| {
            let k = i * 8 + j;
            if zero_mask[k] && i != j { 0.0 } else { entries[k] }
        });
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let mm = parse_matrix_market_str(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(mm.matrix.order(), n);
        prop_assert_eq!(mm.declared_entries, a.lower_nnz());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(mm.matrix.get(i, j), a.get(i, j));
            }
        }
    }
}

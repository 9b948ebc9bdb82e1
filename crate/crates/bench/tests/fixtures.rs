use masakit_bench::{ep1_catalog, lcg_matrix};

#[test]
fn fixtures_are_deterministic() {
    assert_eq!(lcg_matrix(6, 7, 3), lcg_matrix(6, 7, 3));
    assert_ne!(lcg_matrix(6, 7, 3), lcg_matrix(6, 7, 4));
    let m = lcg_matrix(5, 5, 1);
    assert_eq!((m.rows(), m.cols()), (5, 5));
}

#[test]
fn catalog_drops_equivalent_kappa() {
    let ds = ep1_catalog(2);
    assert_eq!(ds.len(), 5);
    assert!(ds.iter().all(|d| d.kappa != Some(-1)));
}

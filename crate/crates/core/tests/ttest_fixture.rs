//! Frozen reference values from an independent statistics package
//! (scipy `ttest_rel` and `ttest_ind(equal_var=False)` on `b` against `a`).

use petforest::harness::{paired_t_test, welch_t_test, Verdict};
use petforest::metrics::Metric;

#[rustfmt::skip]
const A: [f64; 100] = [
    0.172982, 0.199625, 0.1852, 0.132763, 0.203918, 0.220482, 0.197462, 0.231014, 0.227622, 0.15061,
    0.176834, 0.208913, 0.141352, 0.222961, 0.223273, 0.16547, 0.182479, 0.18603, 0.240199, 0.208926,
    0.260713, 0.229517, 0.237156, 0.185182, 0.237093, 0.229178, 0.152167, 0.248999, 0.182319, 0.176859,
    0.17789, 0.220929, 0.172938, 0.151821, 0.1716, 0.212408, 0.223927, 0.177463, 0.186718, 0.200679,
    0.214675, 0.250123, 0.164502, 0.284567, 0.205868, 0.232591, 0.230684, 0.210183, 0.22627, 0.208209,
    0.191684, 0.175241, 0.19772, 0.193573, 0.225807, 0.23797, 0.168443, 0.152512, 0.17166, 0.218681,
    0.188634, 0.192169, 0.191688, 0.172967, 0.196505, 0.216581, 0.175586, 0.191983, 0.207832, 0.229362,
    0.181562, 0.247027, 0.19022, 0.160175, 0.218175, 0.196723, 0.21433, 0.092159, 0.203457, 0.195459,
    0.268953, 0.14669, 0.228455, 0.169487, 0.225451, 0.191669, 0.237772, 0.19519, 0.214548, 0.169694,
    0.180703, 0.174507, 0.227718, 0.227709, 0.214081, 0.193797, 0.162105, 0.162892, 0.213574, 0.22859,
];

#[rustfmt::skip]
const B: [f64; 100] = [
    0.173862, 0.252757, 0.165159, 0.132557, 0.213648, 0.232549, 0.199577, 0.171733, 0.176285, 0.129574,
    0.17989, 0.179083, 0.239182, 0.216456, 0.341241, 0.221343, 0.284651, 0.159861, 0.238065, 0.241362,
    0.175388, 0.232362, 0.261264, 0.068383, 0.264893, 0.306311, 0.242659, 0.224349, 0.141083, 0.135581,
    0.220876, 0.243607, 0.233219, 0.147049, 0.16044, 0.186544, 0.259526, 0.228912, 0.240645, 0.137718,
    0.190016, 0.145019, 0.180107, 0.276477, 0.182343, 0.165986, 0.256528, 0.260131, 0.245459, 0.269159,
    0.150892, 0.142542, 0.187768, 0.243356, 0.178942, 0.209689, 0.126282, 0.16737, 0.227455, 0.227088,
    0.243122, 0.060671, 0.234387, 0.095973, 0.185911, 0.267268, 0.163287, 0.217456, 0.179796, 0.244404,
    0.219101, 0.263263, 0.181942, 0.147093, 0.235831, 0.201866, 0.260399, 0.086416, 0.242745, 0.250711,
    0.310869, 0.18432, 0.198964, 0.227542, 0.182353, 0.253589, 0.317865, 0.217739, 0.227773, 0.157346,
    0.256426, 0.303816, 0.161342, 0.293302, 0.272585, 0.153801, 0.144299, 0.143113, 0.265521, 0.263285,
];

#[test]
fn paired_matches_reference() {
    let c = paired_t_test(Metric::ZeroOneMse, &A, &B, 0.1).unwrap();
    assert!(
        (c.t_statistic - 1.6998599183311796).abs() < 1e-10,
        "t = {}",
        c.t_statistic
    );
    assert!(
        (c.p_value - 0.09229716165752087).abs() < 1e-8,
        "p = {}",
        c.p_value
    );
    // b is higher on a lower-is-better metric and p < 0.1.
    assert_eq!(c.verdict, Verdict::Loss);
    assert_eq!(
        paired_t_test(Metric::Aulc, &A, &B, 0.1).unwrap().verdict,
        Verdict::Win
    );
    assert_eq!(
        paired_t_test(Metric::ZeroOneMse, &A, &B, 0.05)
            .unwrap()
            .verdict,
        Verdict::Tie
    );
}

#[test]
fn welch_matches_reference() {
    let c = welch_t_test(Metric::ZeroOneMse, &A, &B, 0.1).unwrap();
    assert!(
        (c.t_statistic - 1.3166392120345851).abs() < 1e-10,
        "t = {}",
        c.t_statistic
    );
    assert!(
        (c.p_value - 0.18987633760658257).abs() < 1e-8,
        "p = {}",
        c.p_value
    );
    assert_eq!(c.verdict, Verdict::Tie);
}

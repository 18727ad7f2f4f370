#![allow(dead_code)]

use logperiod::polyform::{parse_log_form, parse_poly, rat, LogForm, MonomialMap, Polynomial, Variables};
use logperiod::region::{BoundingBox, Region};

pub fn unit_box(n: usize) -> Option<BoundingBox> {
    Some(BoundingBox(vec![(rat(0, 1), rat(1, 1)); n]))
}

pub fn real(n: usize, p: usize, cells: &[&[&str]]) -> Region {
    Region::from_strings(n, p, cells, unit_box(n)).unwrap()
}

pub fn s_half() -> Region {
    Region::from_strings(
        2,
        2,
        &[&["r1 + r2 >= 1"]],
        Some(BoundingBox(vec![(rat(0, 1), rat(1, 1)), (rat(0, 1), rat(1, 2))])),
    )
    .unwrap()
}

pub fn li2_half() -> f64 {
    (1..=60).map(|k| 0.5f64.powi(k) / (k * k) as f64).sum()
}

/// Linear regions with two divisors, in two and three variables.
pub fn linear_corpus() -> Vec<Region> {
    let two: [&[&[&str]]; 14] = [
        &[&["r1 + r2 >= 1"]],
        &[&[]],
        &[&["r2 <= r1"]],
        &[&["r1 + r2 <= 1"]],
        &[&["r1 + 2*r2 >= 1"]],
        &[&["r1 = r2"]],
        &[&["r1 = 1/2"]],
        &[&["r2 = 0"]],
        &[&["r1 >= 1/4", "r2 >= 1/4"]],
        &[&["r1 + r2 >= 1/2", "r1 + r2 <= 3/2"]],
        &[&["r1 - r2 >= 1/2"], &["r2 - r1 >= 1/2"]],
        &[&["r1 + r2 >= 1"], &["r1 = 0", "r2 = 0"]],
        &[&["r2 = 1/3"], &["r1 = 1/3"]],
        &[&["r1 >= 1/2"]],
    ];
    let three: [&[&[&str]]; 8] = [
        &[&["r1 + r2 >= 1"]],
        &[&["r1 + r2 + x3 >= 1"]],
        &[&["x3 = 0"]],
        &[&["r1 = x3"]],
        &[&["r1 + r2 >= x3", "x3 >= 1/2"]],
        &[&["r2 = 1/2", "x3 <= r1"]],
        &[&["r1 + x3 <= 1", "r2 >= 1/3"]],
        &[&[]],
    ];
    let mut out: Vec<Region> = two.iter().map(|c| real(2, 2, c)).collect();
    out.extend(three.iter().map(|c| real(3, 2, c)));
    out
}

/// `(region, form, cut)` triples: the cut splits each cell into `cut ≤ 0`
/// and `cut ≥ 0`.
pub fn additivity_corpus() -> Vec<(Region, LogForm, Polynomial)> {
    let cases: [(usize, usize, &[&str], &str, &str); 10] = [
        (2, 2, &["r1 + r2 >= 1"], "dr1/r1 ^ dr2/r2", "r1 - 3/4"),
        (2, 2, &["r1 + r2 >= 1"], "dr1/r1 ^ dr2/r2", "r1 - r2"),
        (2, 2, &["r1 >= 1/4"], "dr1/r1 ^ dr2", "r2 - 1/2"),
        (2, 2, &["r1 + r2 >= 1/2"], "r1*dr1/r1 ^ dr2/r2", "r1 + r2 - 1"),
        (2, 0, &["x1 + x2 <= 1"], "x1*x2*dx1 ^ dx2", "x1 - x2"),
        (2, 0, &[], "(x1^2 - x2)*dx1 ^ dx2", "x1 - 1/3"),
        (2, 1, &["r1 >= x2"], "dr1/r1 ^ dx2", "x2 - 1/2"),
        (3, 2, &["r1 + r2 >= 1"], "dr1/r1 ^ dr2/r2 ^ dx3", "x3 - 1/2"),
        (3, 0, &["x1 + x2 + x3 <= 1"], "dx1 ^ dx2 ^ dx3", "x1 + x2 - 1/2"),
        (1, 1, &["r1 >= 1/8"], "dr1/r1", "r1 - 1/2"),
    ];
    cases
        .iter()
        .map(|(n, p, cell, form, cut)| {
            let region = real(*n, *p, &[cell]);
            let w = parse_log_form(form, *n, *p).unwrap();
            let cut = parse_poly(cut, &Variables::real(*n, *p)).unwrap();
            (region, w, cut)
        })
        .collect()
}

/// Monomial maps on `(r1, r2, x3)` that preserve the divisors.
pub fn chart_maps() -> Vec<MonomialMap> {
    let vars = Variables::real(3, 2);
    let maps: [[&str; 3]; 5] = [
        ["r1", "r1*r2", "x3"],
        ["r1*r2", "r2", "x3"],
        ["r1", "r1*r2", "x3 + r1"],
        ["-3*r1^2*r2", "r1*r2", "x3^2 - r2"],
        ["r2", "r1", "x3*r1 + 2"],
    ];
    maps.iter()
        .map(|m| {
            let images = m.iter().map(|s| parse_poly(s, &vars).unwrap()).collect();
            MonomialMap::from_polys(2, 2, images).unwrap()
        })
        .collect()
}

/// Pushforward bound corpus: `(region, map, coefficient)`.
pub fn bound_corpus() -> Vec<(Region, Vec<Polynomial>, Polynomial)> {
    let interval = |lo: i64, hi: i64| {
        Region::from_strings(1, 0, &[&[]], Some(BoundingBox(vec![(rat(lo, 1), rat(hi, 1))]))).unwrap()
    };
    let v1 = Variables::real(1, 0);
    let v2 = Variables::real(2, 0);
    let p1 = |s: &str| parse_poly(s, &v1).unwrap();
    let p2 = |s: &str| parse_poly(s, &v2).unwrap();
    vec![
        (interval(0, 1), vec![p1("x1^2")], p1("1")),
        (interval(-1, 1), vec![p1("x1^2")], p1("x1 + 2")),
        (real(2, 0, &[&[]]), vec![p2("x1 + x2"), p2("x1 - x2")], p2("x1*x2 + 1")),
    ]
}

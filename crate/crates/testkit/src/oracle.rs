//! Brute-force reference computations.
//!
//! Everything here recounts directly from dataset rows on every call and
//! works in the plain probability domain. No frequency cube, no log-space
//! accumulation, no shared code with the paths under test.

use mobayes::dataset::{Cell, Dataset};
use mobayes::moea::Objectives;

fn rows(ds: &Dataset) -> impl Iterator<Item = (&[Cell], u32)> {
    (0..ds.n_instances()).map(move |r| (ds.row(r), ds.class_of(r)))
}

fn cell_is(cell: &Cell, v: usize) -> bool {
    matches!(cell, Cell::Idx(x) if *x as usize == v)
}

/// Count of rows satisfying a predicate over (cells, class).
fn count(ds: &Dataset, pred: impl Fn(&[Cell], u32) -> bool) -> u64 {
    rows(ds).filter(|(cells, y)| pred(cells, *y)).count() as u64
}

/// Naive Bayes by the direct product formula:
/// P̂(y)·Π_j P̂(x_j|y) with add-one smoothing, normalized.
pub fn nb_oracle(train: &Dataset, instance: &[Cell]) -> Vec<f64> {
    let m = train.n_classes();
    let k = train.n_instances() as f64;
    let mut scores = Vec::with_capacity(m);
    for y in 0..m {
        let f_y = count(train, |_, c| c as usize == y) as f64;
        let mut score = (f_y + 1.0) / (k + m as f64);
        for (j, cell) in instance.iter().enumerate() {
            let Some(w) = cell.index() else { continue };
            let w = w as usize;
            let f_yjw = count(train, |cells, c| c as usize == y && cell_is(&cells[j], w)) as f64;
            let seen_yj = count(train, |cells, c| c as usize == y && !cells[j].is_missing()) as f64;
            let v_j = train.attributes()[j].n_values() as f64;
            score *= (f_yjw + 1.0) / (seen_yj + v_j);
        }
        scores.push(score);
    }
    normalize(scores)
}

/// Averaged one-dependence estimation by explicit enumeration: build every
/// eligible super-parent model independently, average them, normalize.
pub fn spode_oracle(train: &Dataset, instance: &[Cell], m_threshold: u64) -> Vec<f64> {
    let m = train.n_classes();
    let n = train.n_attributes();

    let parents: Vec<(usize, usize)> = (0..n)
        .filter_map(|i| instance[i].index().map(|v| (i, v as usize)))
        .filter(|&(i, v)| count(train, |cells, _| cell_is(&cells[i], v)) >= m_threshold)
        .collect();
    if parents.is_empty() {
        return nb_oracle(train, instance);
    }

    let mut scores = Vec::with_capacity(m);
    for y in 0..m {
        let mut sum = 0.0f64;
        for &(i, v) in &parents {
            let f_yiv = count(train, |cells, c| c as usize == y && cell_is(&cells[i], v)) as f64;
            let k_i = count(train, |cells, _| !cells[i].is_missing()) as f64;
            let v_i = train.attributes()[i].n_values() as f64;
            let mut spode = (f_yiv + 1.0) / (k_i + (m as f64) * v_i);
            for (j, cell) in instance.iter().enumerate() {
                if j == i {
                    continue;
                }
                let Some(w) = cell.index() else { continue };
                let w = w as usize;
                let f3 = count(train, |cells, c| {
                    c as usize == y && cell_is(&cells[i], v) && cell_is(&cells[j], w)
                }) as f64;
                let base = count(train, |cells, c| {
                    c as usize == y && cell_is(&cells[i], v) && !cells[j].is_missing()
                }) as f64;
                let v_j = train.attributes()[j].n_values() as f64;
                spode *= (f3 + 1.0) / (base + v_j);
            }
            sum += spode;
        }
        scores.push(sum / parents.len() as f64);
    }
    normalize(scores)
}

fn normalize(scores: Vec<f64>) -> Vec<f64> {
    let total: f64 = scores.iter().sum();
    scores.into_iter().map(|s| s / total).collect()
}

/// Non-dominated front peeling by repeated O(N²) scans, with dominance
/// re-stated inline (maximize merit, minimize cardinality).
pub fn peel_fronts(objectives: &[Objectives]) -> Vec<Vec<usize>> {
    fn dom(a: &Objectives, b: &Objectives) -> bool {
        a.merit >= b.merit
            && a.cardinality <= b.cardinality
            && (a.merit > b.merit || a.cardinality < b.cardinality)
    }
    let mut remaining: Vec<usize> = (0..objectives.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&p| {
                !remaining
                    .iter()
                    .any(|&q| q != p && dom(&objectives[q], &objectives[p]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobayes::dataset::AttributeSpec;

    fn d4() -> Dataset {
        let attrs = vec![
            AttributeSpec::nominal("a1", vec!["0".into(), "1".into()]),
            AttributeSpec::nominal("a2", vec!["0".into(), "1".into()]),
        ];
        let class = AttributeSpec::nominal("y", vec!["0".into(), "1".into()]);
        let rows = vec![
            vec![Cell::Idx(0), Cell::Idx(0)],
            vec![Cell::Idx(0), Cell::Idx(1)],
            vec![Cell::Idx(1), Cell::Idx(0)],
            vec![Cell::Idx(1), Cell::Idx(1)],
        ];
        Dataset::new(attrs, class, rows, vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn oracle_reproduces_hand_values() {
        // hand enumeration of both super-parents for (0,0): 17/24 vs 7/24
        let p = spode_oracle(&d4(), &[Cell::Idx(0), Cell::Idx(0)], 1);
        assert!((p[0] - 17.0 / 24.0).abs() < 1e-15);
        assert!((p[1] - 7.0 / 24.0).abs() < 1e-15);

        // naive Bayes hand product for (0,0): 3/4 vs 1/4
        let p = nb_oracle(&d4(), &[Cell::Idx(0), Cell::Idx(0)]);
        assert!((p[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn peeling_matches_hand_fronts() {
        let objs = vec![
            Objectives { merit: 0.9, cardinality: 3 },
            Objectives { merit: 0.8, cardinality: 2 },
            Objectives { merit: 0.7, cardinality: 4 },
        ];
        assert_eq!(peel_fronts(&objs), vec![vec![0, 1], vec![2]]);
    }
}

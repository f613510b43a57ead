//! Seeded random dataset and objective generators.

use rand::Rng;

use mobayes::dataset::{AttributeSpec, Cell, Dataset};
use mobayes::moea::Objectives;

/// Shape limits for [`random_dataset`].
#[derive(Debug, Clone, Copy)]
pub struct DatasetShape {
    pub max_attributes: usize,
    pub max_values: usize,
    pub max_rows: usize,
    pub max_classes: usize,
    pub missing_rate: f64,
}

impl Default for DatasetShape {
    fn default() -> Self {
        DatasetShape {
            max_attributes: 6,
            max_values: 4,
            max_rows: 200,
            max_classes: 3,
            missing_rate: 0.1,
        }
    }
}

/// Uniformly random nominal dataset within the given shape. Class cells are
/// never missing; attribute cells go missing at `missing_rate`.
pub fn random_dataset<R: Rng>(rng: &mut R, shape: &DatasetShape) -> Dataset {
    let n_attrs = rng.gen_range(1..=shape.max_attributes);
    let n_classes = rng.gen_range(2..=shape.max_classes);
    let n_rows = rng.gen_range(n_classes.max(5)..=shape.max_rows);

    let attrs: Vec<AttributeSpec> = (0..n_attrs)
        .map(|a| {
            let n_values = rng.gen_range(2..=shape.max_values);
            AttributeSpec::nominal(
                format!("a{a}"),
                (0..n_values).map(|v| format!("v{v}")).collect(),
            )
        })
        .collect();
    let class = AttributeSpec::nominal(
        "class",
        (0..n_classes).map(|c| format!("c{c}")).collect(),
    );

    let mut rows = Vec::with_capacity(n_rows);
    let mut classes = Vec::with_capacity(n_rows);
    for r in 0..n_rows {
        // guarantee every class appears at least once
        let y = if r < n_classes {
            r as u32
        } else {
            rng.gen_range(0..n_classes) as u32
        };
        let row: Vec<Cell> = attrs
            .iter()
            .map(|spec| {
                if rng.gen_bool(shape.missing_rate) {
                    Cell::Missing
                } else {
                    Cell::Idx(rng.gen_range(0..spec.n_values()) as u32)
                }
            })
            .collect();
        rows.push(row);
        classes.push(y);
    }
    Dataset::new(attrs, class, rows, classes).expect("generated dataset is valid")
}

/// Random objective vectors: merit uniform in [0,1], cardinality in [1, n].
pub fn random_objectives<R: Rng>(rng: &mut R, len: usize, max_cardinality: usize) -> Vec<Objectives> {
    (0..len)
        .map(|_| Objectives {
            merit: rng.gen(),
            cardinality: rng.gen_range(1..=max_cardinality),
        })
        .collect()
}

/// A selection benchmark: attribute 0 fully determines the class, the other
/// `noise_attributes` are uniform noise over `noise_values` labels.
pub fn signal_dataset<R: Rng>(rng: &mut R, rows: usize, noise_attributes: usize, noise_values: usize) -> Dataset {
    let mut attrs = vec![AttributeSpec::nominal(
        "signal",
        vec!["s0".into(), "s1".into()],
    )];
    for a in 0..noise_attributes {
        attrs.push(AttributeSpec::nominal(
            format!("noise{a}"),
            (0..noise_values).map(|v| format!("u{v}")).collect(),
        ));
    }
    let class = AttributeSpec::nominal("class", vec!["c0".into(), "c1".into()]);

    let mut data = Vec::with_capacity(rows);
    let mut classes = Vec::with_capacity(rows);
    for _ in 0..rows {
        let y: u32 = rng.gen_range(0..2);
        let mut row = vec![Cell::Idx(y)]; // deterministic signal
        for _ in 0..noise_attributes {
            row.push(Cell::Idx(rng.gen_range(0..noise_values) as u32));
        }
        data.push(row);
        classes.push(y);
    }
    Dataset::new(attrs, class, data, classes).expect("generated dataset is valid")
}

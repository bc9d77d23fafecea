use std::collections::{BTreeMap, HashMap};

use super::TreeError;
use crate::label::Label;
use crate::table::{AttributeTable, ColumnKind};

/// Attribute lookup for prediction.
pub trait InstanceValues {
    fn value(&self, attribute: &str) -> Option<f64>;
}

impl InstanceValues for BTreeMap<String, f64> {
    fn value(&self, attribute: &str) -> Option<f64> {
        self.get(attribute).copied()
    }
}

impl InstanceValues for HashMap<String, f64> {
    fn value(&self, attribute: &str) -> Option<f64> {
        self.get(attribute).copied()
    }
}

/// Column-major predictor matrix with labels. Missing cells are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    attributes: Vec<String>,
    index: HashMap<String, usize>,
    columns: Vec<Vec<Option<f64>>>,
    labels: Vec<Label>,
}

impl TrainingSet {
    /// Uses every continuous column except the key and `target` as a predictor.
    pub fn from_table(table: &AttributeTable, target: &str) -> Result<TrainingSet, TreeError> {
        let predictors: Vec<String> = table
            .continuous_columns(&[target])
            .into_iter()
            .map(str::to_string)
            .collect();
        if predictors.is_empty() {
            return Err(TreeError::NoContinuousPredictors);
        }
        TrainingSet::with_attributes(table, target, &predictors)
    }

    /// Reads the named predictors; names absent from the table (or not
    /// continuous) become all-missing columns.
    pub fn with_attributes(
        table: &AttributeTable,
        target: &str,
        attributes: &[String],
    ) -> Result<TrainingSet, TreeError> {
        let t = table
            .column_index(target)
            .ok_or_else(|| TreeError::UnknownTarget(target.to_string()))?;
        let labels = table
            .rows()
            .iter()
            .enumerate()
            .map(|(row, cells)| {
                cells[t]
                    .to_string()
                    .parse::<Label>()
                    .map_err(|value| TreeError::BadTarget { row, value })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let columns = attributes
            .iter()
            .map(|a| match table.column(a) {
                Some(c) if c.kind == ColumnKind::Continuous => {
                    table.numeric_column(a).expect("column exists")
                }
                _ => vec![None; table.len()],
            })
            .collect();
        Ok(TrainingSet::new(attributes.to_vec(), columns, labels))
    }

    /// # Panics
    /// If column lengths differ from the label count.
    pub fn new(attributes: Vec<String>, columns: Vec<Vec<Option<f64>>>, labels: Vec<Label>) -> Self {
        assert_eq!(attributes.len(), columns.len());
        assert!(columns.iter().all(|c| c.len() == labels.len()));
        let index = attributes
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        TrainingSet {
            attributes,
            index,
            columns,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> Label {
        self.labels[row]
    }

    pub fn value(&self, attribute: usize, row: usize) -> Option<f64> {
        self.columns[attribute][row]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn row(&self, row: usize) -> RowView<'_> {
        RowView { set: self, row }
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        let columns = self
            .columns
            .iter()
            .map(|c| indices.iter().map(|&i| c[i]).collect())
            .collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        TrainingSet::new(self.attributes.clone(), columns, labels)
    }
}

/// One training row viewed as an instance.
#[derive(Clone, Copy)]
pub struct RowView<'a> {
    set: &'a TrainingSet,
    row: usize,
}

impl InstanceValues for RowView<'_> {
    fn value(&self, attribute: &str) -> Option<f64> {
        self.set
            .attribute_index(attribute)
            .and_then(|a| self.set.value(a, self.row))
    }
}

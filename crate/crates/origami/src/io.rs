//! File formats.
//!
//! Loss matrices travel as CSV (one row per action, optional header row of
//! outcome labels) or as JSON with explicit action and outcome labels.
//! Probability vectors batch one per CSV row. Fold trees and partitions are
//! schema-versioned JSON. Objective matrices dump as an upper-triangular
//! CSV grid with the meaningless cells left empty.
//!
//! Writers format floats with the shortest round-trip representation, so
//! identical values always serialize to identical bytes.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::objective::ObjectiveMatrix;
use crate::simplex::ProbVector;
use crate::tree::{FoldTree, Merge, Partition};

/// A loss matrix with its optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledLoss {
    pub matrix: LossMatrix,
    pub action_labels: Option<Vec<String>>,
    pub outcome_labels: Option<Vec<String>>,
}

/// Read a loss matrix from CSV. If every cell of the first row parses as a
/// number it is data; otherwise it is taken as outcome labels.
pub fn read_loss_csv(reader: impl Read) -> Result<LabeledLoss> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut outcome_labels: Option<Vec<String>> = None;
    for (row_index, record) in csv.records().enumerate() {
        let record = record?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(col, cell)| cell.trim().parse::<f64>().map_err(|_| col))
            .collect();
        match parsed {
            Ok(values) => rows.push(values),
            Err(col) => {
                if row_index == 0 {
                    outcome_labels =
                        Some(record.iter().map(|c| c.trim().to_string()).collect());
                } else {
                    return Err(Error::Parse {
                        line: row_index + 1,
                        column: col + 1,
                        message: format!(
                            "expected a number, found {:?}",
                            record.get(col).unwrap_or("")
                        ),
                    });
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no data rows".into(),
        });
    }
    let matrix = LossMatrix::from_rows(rows)?;
    if let Some(labels) = &outcome_labels {
        if labels.len() != matrix.outcome_count() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!(
                    "{} header labels for {} outcome columns",
                    labels.len(),
                    matrix.outcome_count()
                ),
            });
        }
    }
    Ok(LabeledLoss {
        matrix,
        action_labels: None,
        outcome_labels,
    })
}

pub fn write_loss_csv(loss: &LabeledLoss, mut writer: impl Write) -> Result<()> {
    if let Some(labels) = &loss.outcome_labels {
        writeln!(writer, "{}", labels.join(","))?;
    }
    for row in loss.matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(writer, "{}", cells.join(","))?;
    }
    Ok(())
}

/// JSON form of a loss matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LossJson {
    actions: Vec<String>,
    outcomes: Vec<String>,
    entries: Vec<Vec<f64>>,
}

pub fn read_loss_json(reader: impl Read) -> Result<LabeledLoss> {
    let file: LossJson = serde_json::from_reader(reader)?;
    let matrix = LossMatrix::from_rows(file.entries)?;
    if file.actions.len() != matrix.action_count() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!(
                "{} action labels for {} rows",
                file.actions.len(),
                matrix.action_count()
            ),
        });
    }
    if file.outcomes.len() != matrix.outcome_count() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!(
                "{} outcome labels for {} columns",
                file.outcomes.len(),
                matrix.outcome_count()
            ),
        });
    }
    Ok(LabeledLoss {
        matrix,
        action_labels: Some(file.actions),
        outcome_labels: Some(file.outcomes),
    })
}

pub fn write_loss_json(loss: &LabeledLoss, writer: impl Write) -> Result<()> {
    let actions = loss.action_labels.clone().unwrap_or_else(|| {
        (0..loss.matrix.action_count())
            .map(|a| format!("a{a}"))
            .collect()
    });
    let outcomes = loss.outcome_labels.clone().unwrap_or_else(|| {
        (0..loss.matrix.outcome_count())
            .map(|z| format!("z{z}"))
            .collect()
    });
    let file = LossJson {
        actions,
        outcomes,
        entries: loss.matrix.rows().map(|r| r.to_vec()).collect(),
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

/// Load a loss matrix, picking the format from the extension.
pub fn load_loss(path: &Path) -> Result<LabeledLoss> {
    let file = std::fs::File::open(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_loss_json(file),
        _ => read_loss_csv(file),
    }
}

/// Read probability vectors, one per CSV row.
pub fn read_prob_vectors_csv(reader: impl Read) -> Result<Vec<ProbVector>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(reader);
    let mut out = Vec::new();
    for (row_index, record) in csv.records().enumerate() {
        let record = record?;
        let mut entries = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            entries.push(cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: row_index + 1,
                column: col + 1,
                message: format!("expected a number, found {cell:?}"),
            })?);
        }
        out.push(ProbVector::new(entries)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no probability vectors".into(),
        });
    }
    Ok(out)
}

pub fn write_prob_vectors_csv(vectors: &[ProbVector], mut writer: impl Write) -> Result<()> {
    for p in vectors {
        let cells: Vec<String> = p.entries().iter().map(|v| v.to_string()).collect();
        writeln!(writer, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Schema-versioned fold-tree file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeFile {
    pub schema: u32,
    pub leaf_count: usize,
    pub merges: Vec<Merge>,
}

impl TreeFile {
    pub fn from_tree(tree: &FoldTree) -> Self {
        Self {
            schema: 1,
            leaf_count: tree.leaf_count(),
            merges: tree.merges().to_vec(),
        }
    }

    pub fn into_tree(self) -> Result<FoldTree> {
        if self.schema != 1 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unsupported fold-tree schema {}", self.schema),
            });
        }
        FoldTree::from_parts(self.leaf_count, self.merges)
    }
}

pub fn write_tree_json(tree: &FoldTree, writer: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(writer, &TreeFile::from_tree(tree))?;
    Ok(())
}

pub fn read_tree_json(reader: impl Read) -> Result<FoldTree> {
    let file: TreeFile = serde_json::from_reader(reader)?;
    file.into_tree()
}

/// Schema-versioned partition file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionFile {
    pub schema: u32,
    pub cells: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PartitionFile {
    pub fn from_partition(partition: &Partition, labels: Option<Vec<String>>) -> Self {
        Self {
            schema: 1,
            cells: partition.cells().to_vec(),
            labels,
        }
    }

    pub fn into_partition(self) -> Result<Partition> {
        if self.schema != 1 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unsupported partition schema {}", self.schema),
            });
        }
        Partition::new(self.cells)
    }
}

pub fn write_partition_json(
    partition: &Partition,
    labels: Option<Vec<String>>,
    writer: impl Write,
) -> Result<()> {
    serde_json::to_writer_pretty(writer, &PartitionFile::from_partition(partition, labels))?;
    Ok(())
}

pub fn read_partition_json(reader: impl Read) -> Result<Partition> {
    let file: PartitionFile = serde_json::from_reader(reader)?;
    file.into_partition()
}

/// Upper-triangular CSV dump of an objective matrix; diagonal and lower
/// cells are empty.
pub fn write_objective_csv(matrix: &ObjectiveMatrix, mut writer: impl Write) -> Result<()> {
    for i in 0..matrix.dim() {
        let cells: Vec<String> = (0..matrix.dim())
            .map(|j| {
                if i < j {
                    matrix.get(i, j).to_string()
                } else {
                    String::new()
                }
            })
            .collect();
        writeln!(writer, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_objective_csv(reader: impl Read) -> Result<ObjectiveMatrix> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (row_index, record) in csv.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if cell.is_empty() {
                row.push(None);
            } else {
                row.push(Some(cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: row_index + 1,
                    column: col + 1,
                    message: format!("expected a number, found {cell:?}"),
                })?));
            }
        }
        rows.push(row);
    }
    let dim = rows.len();
    let mut matrix = ObjectiveMatrix::new(dim)?;
    for (i, row) in rows.iter().enumerate() {
        for j in (i + 1)..dim {
            if let Some(Some(v)) = row.get(j) {
                matrix.set(i, j, *v)?;
            }
        }
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::vertex_objective_matrix;

    #[test]
    fn csv_round_trip_with_header() {
        let loss = LabeledLoss {
            matrix: LossMatrix::from_rows(vec![vec![0.25, 0.5], vec![1.0, 0.125]]).unwrap(),
            action_labels: None,
            outcome_labels: Some(vec!["north".into(), "south".into()]),
        };
        let mut buffer = Vec::new();
        write_loss_csv(&loss, &mut buffer).unwrap();
        let back = read_loss_csv(buffer.as_slice()).unwrap();
        assert_eq!(back.matrix, loss.matrix);
        assert_eq!(back.outcome_labels, loss.outcome_labels);
    }

    #[test]
    fn csv_without_header_is_data() {
        let text = "0.1,0.9\n0.8,0.2\n";
        let loss = read_loss_csv(text.as_bytes()).unwrap();
        assert_eq!(loss.matrix.action_count(), 2);
        assert!(loss.outcome_labels.is_none());
    }

    #[test]
    fn csv_parse_errors_carry_position() {
        let text = "0.1,0.9\n0.8,oops\n";
        match read_loss_csv(text.as_bytes()) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!((line, column), (2, 2));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let loss = LabeledLoss {
            matrix: LossMatrix::from_rows(vec![vec![0.1, 0.2, 0.3]]).unwrap(),
            action_labels: Some(vec!["only".into()]),
            outcome_labels: Some(vec!["a".into(), "b".into(), "c".into()]),
        };
        let mut buffer = Vec::new();
        write_loss_json(&loss, &mut buffer).unwrap();
        let back = read_loss_json(buffer.as_slice()).unwrap();
        assert_eq!(back, loss);
    }

    #[test]
    fn prob_vector_batches_round_trip() {
        let vectors = vec![
            ProbVector::new(vec![0.5, 0.5]).unwrap(),
            ProbVector::new(vec![0.25, 0.75]).unwrap(),
        ];
        let mut buffer = Vec::new();
        write_prob_vectors_csv(&vectors, &mut buffer).unwrap();
        let back = read_prob_vectors_csv(buffer.as_slice()).unwrap();
        assert_eq!(back, vectors);
    }

    #[test]
    fn tree_file_round_trip_and_schema_check() {
        let mut tree = FoldTree::new(4).unwrap();
        tree.push_fold(crate::simplex::Fold::new(0, 2).unwrap(), 0.125)
            .unwrap();
        let mut buffer = Vec::new();
        write_tree_json(&tree, &mut buffer).unwrap();
        let back = read_tree_json(buffer.as_slice()).unwrap();
        assert_eq!(back, tree);

        let bad = r#"{"schema": 2, "leaf_count": 2, "merges": []}"#;
        assert!(read_tree_json(bad.as_bytes()).is_err());
    }

    #[test]
    fn partition_file_round_trip() {
        let partition = Partition::new(vec![vec![0, 2], vec![1]]).unwrap();
        let mut buffer = Vec::new();
        write_partition_json(&partition, Some(vec!["x".into(), "y".into()]), &mut buffer)
            .unwrap();
        let back = read_partition_json(buffer.as_slice()).unwrap();
        assert_eq!(back, partition);
    }

    #[test]
    fn objective_csv_round_trips_upper_triangle() {
        let loss =
            LossMatrix::from_rows(vec![vec![0.3, 0.9, 0.1], vec![0.7, 0.2, 0.5]]).unwrap();
        let matrix = vertex_objective_matrix(&loss).unwrap();
        let mut buffer = Vec::new();
        write_objective_csv(&matrix, &mut buffer).unwrap();
        let text = String::from_utf8(buffer.clone()).unwrap();
        // Low-triangle cells stay empty.
        assert!(text.lines().nth(1).unwrap().starts_with(','));
        let back = read_objective_csv(buffer.as_slice()).unwrap();
        assert_eq!(back, matrix);
    }
}

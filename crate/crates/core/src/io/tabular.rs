//! CSV feature matrices and training logs, JSON-lines gradient logs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, RowSemantics};
use crate::training::{EpochRecord, GradientEntry, GradientLog, TrainingLog};

pub const TRAINING_HEADER: [&str; 4] = ["epoch", "train_loss", "val_loss", "val_accuracy"];

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let path = e
        .position()
        .map_or_else(|| "csv".to_string(), |p| format!("line {}", p.line()));
    Error::parse(path, e.to_string())
}

fn finite(cell: &str, path: impl Fn() -> String) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::parse(path(), format!("'{cell}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(
            path(),
            format!("'{cell}' is not a finite number"),
        ));
    }
    Ok(v)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Parses `f0,f1,...` CSV into a feature matrix.
pub fn parse_feature_matrix(text: &str, semantics: RowSemantics) -> Result<FeatureMatrix> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::parse("line 1", "missing header"));
    }
    for (i, name) in header.iter().enumerate() {
        if name.trim() != format!("f{i}") {
            return Err(Error::parse(
                format!("line 1 column {}", i + 1),
                format!("expected header 'f{i}', found '{name}'"),
            ));
        }
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| finite(cell, || format!("line {line} column {}", j + 1)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse("csv", "no data rows"));
    }
    FeatureMatrix::from_rows(&rows, semantics).map_err(|e| Error::parse("csv", e.to_string()))
}

pub fn serialize_feature_matrix(features: &FeatureMatrix) -> String {
    let mut out = (0..features.dim())
        .map(|i| format!("f{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for row in features.rows() {
        out.push_str(&row.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Parses an `epoch,train_loss,val_loss,val_accuracy` CSV.
pub fn parse_training_log(text: &str, num_params: usize) -> Result<TrainingLog> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != TRAINING_HEADER {
        return Err(Error::parse(
            "line 1",
            format!(
                "expected header '{}', found '{}'",
                TRAINING_HEADER.join(","),
                names.join(",")
            ),
        ));
    }
    let mut epochs: Vec<EpochRecord> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let at = |col: &str| format!("line {line} {col}");
        let epoch: u32 = record[0].trim().parse().map_err(|_| {
            Error::parse(
                at("epoch"),
                format!("'{}' is not a positive integer", &record[0]),
            )
        })?;
        if epoch == 0 {
            return Err(Error::parse(at("epoch"), "epochs are 1-based"));
        }
        if let Some(prev) = epochs.last() {
            if epoch <= prev.epoch {
                return Err(Error::parse(at("epoch"), "epochs not strictly increasing"));
            }
        }
        let train_loss = finite(&record[1], || at("train_loss"))?;
        let val_loss = finite(&record[2], || at("val_loss"))?;
        let val_accuracy = finite(&record[3], || at("val_accuracy"))?;
        if !(0.0..=1.0).contains(&val_accuracy) {
            return Err(Error::parse(
                at("val_accuracy"),
                format!("{val_accuracy} is outside the range [0, 1]"),
            ));
        }
        epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_accuracy,
        });
    }
    TrainingLog::new(epochs, num_params).map_err(|e| Error::parse("log", e.to_string()))
}

pub fn serialize_training_log(log: &TrainingLog) -> String {
    let mut out = TRAINING_HEADER.join(",");
    out.push('\n');
    for r in log.epochs() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.epoch, r.train_loss, r.val_loss, r.val_accuracy
        ));
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GradientLine {
    epoch: u32,
    grads: Vec<f64>,
}

/// Parses one `{"epoch": e, "grads": [...]}` object per non-blank line.
pub fn parse_gradient_log(text: &str) -> Result<GradientLog> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let path = format!("line {}", i + 1);
        let g: GradientLine =
            serde_json::from_str(line).map_err(|e| Error::parse(path.clone(), e.to_string()))?;
        if g.grads.is_empty() {
            return Err(Error::parse(path, "empty gradient vector"));
        }
        if let Some(prev) = entries.last().map(|e: &GradientEntry| e.epoch) {
            if g.epoch < prev {
                return Err(Error::parse(path, "gradient epochs decrease"));
            }
        }
        entries.push(GradientEntry {
            epoch: g.epoch,
            grads: g.grads,
        });
    }
    if entries.is_empty() {
        return Err(Error::parse("gradients", "no entries"));
    }
    GradientLog::new(entries).map_err(|e| Error::parse("gradients", e.to_string()))
}

pub fn serialize_gradient_log(log: &GradientLog) -> String {
    let mut out = String::new();
    for e in log.entries() {
        let line = GradientLine {
            epoch: e.epoch,
            grads: e.grads.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("gradient lines serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_text(n: usize) -> String {
        let mut s = "epoch,train_loss,val_loss,val_accuracy\n".to_string();
        for e in 1..=n {
            s.push_str(&format!(
                "{e},{},{},{}\n",
                1.0 / e as f64,
                1.1 / e as f64,
                0.5 + 0.01 * e as f64
            ));
        }
        s
    }

    #[test]
    fn thirty_epochs() {
        let log = parse_training_log(&log_text(30), 14).unwrap();
        assert_eq!(log.len(), 30);
        assert_eq!(
            parse_training_log(&serialize_training_log(&log), 14).unwrap(),
            log
        );
    }

    #[test]
    fn crlf_is_accepted() {
        let text = log_text(3).replace('\n', "\r\n");
        assert_eq!(parse_training_log(&text, 1).unwrap().len(), 3);
    }

    #[test]
    fn training_log_errors() {
        let shuffled = "epoch,train_loss,val_loss,val_accuracy\n2,1,1,0.5\n1,1,1,0.5\n";
        let e = parse_training_log(shuffled, 1).unwrap_err();
        assert!(
            e.to_string().contains("epochs not strictly increasing"),
            "{e}"
        );
        assert!(e.to_string().contains("line 3"), "{e}");

        let range = "epoch,train_loss,val_loss,val_accuracy\n1,1,1,1.2\n";
        let e = parse_training_log(range, 1).unwrap_err();
        assert!(e.to_string().contains("range"), "{e}");

        let missing = "epoch,train_loss,val_loss\n1,1,1\n";
        assert!(parse_training_log(missing, 1).is_err());
        let nonnum = "epoch,train_loss,val_loss,val_accuracy\n1,abc,1,0.5\n";
        let e = parse_training_log(nonnum, 1).unwrap_err();
        assert!(e.to_string().contains("train_loss"), "{e}");
        let nan = "epoch,train_loss,val_loss,val_accuracy\n1,NaN,1,0.5\n";
        assert!(parse_training_log(nan, 1).is_err());
        let short = "epoch,train_loss,val_loss,val_accuracy\n1,1,1\n";
        assert!(parse_training_log(short, 1).is_err());
    }

    #[test]
    fn feature_csv() {
        let text = "f0,f1,f2\n0.1,0.2,0.3\n1,2,3\n";
        let f = parse_feature_matrix(text, RowSemantics::Generic).unwrap();
        assert_eq!((f.n_samples(), f.dim()), (2, 3));
        assert_eq!(
            parse_feature_matrix(&serialize_feature_matrix(&f), RowSemantics::Generic).unwrap(),
            f
        );
        assert!(parse_feature_matrix("a,b\n1,2\n", RowSemantics::Generic).is_err());
        assert!(parse_feature_matrix("f0,f1\n1,inf\n", RowSemantics::Generic).is_err());
        assert!(parse_feature_matrix("f0,f1\n", RowSemantics::Generic).is_err());
        assert!(parse_feature_matrix("f0,f1\n0.5,0.6\n", RowSemantics::Probability).is_err());
    }

    #[test]
    fn gradient_jsonl() {
        let g = parse_gradient_log("{\"epoch\": 5, \"grads\": [3, 4]}\n\n").unwrap();
        assert_eq!(g.entries()[0].grads, vec![3.0, 4.0]);
        assert_eq!(parse_gradient_log(&serialize_gradient_log(&g)).unwrap(), g);
        let e =
            parse_gradient_log("{\"epoch\": 2, \"grads\": [1]}\n{\"epoch\": 1, \"grads\": [1]}\n")
                .unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_gradient_log("{\"epoch\": 1, \"grads\": []}").is_err());
        assert!(parse_gradient_log("").is_err());
        assert!(parse_gradient_log("{\"epoch\": 1, \"grads\": [NaN]}").is_err());
    }
}

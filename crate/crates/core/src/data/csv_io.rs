//! Long-form epoch CSV and feature-matrix CSV.
//!
//! Both formats allow leading `# key=value` comment lines, which carry
//! metadata such as the sampling rate or the producing configuration digest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::data::{Dataset, Provenance};
use crate::error::{Error, Result};
use crate::layout::{Label, CHANNELS, N_CHANNELS};
use crate::signal::{Epoch, FeatureMatrix, DEFAULT_FS};

pub type CsvMeta = BTreeMap<String, String>;

const EPOCH_KEYS: [&str; 4] = ["subject_id", "label", "epoch_index", "sample_index"];
const FEATURE_KEYS: [&str; 3] = ["subject_id", "label", "epoch_index"];

fn csv_err(e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        return Error::Io(std::io::Error::other(e.to_string()));
    }
    Error::Parse {
        row: e.position().map(|p| p.line()).unwrap_or(0),
        column: String::new(),
        message: e.to_string(),
    }
}

/// Splits leading `#` lines off a reader and parses them as `key=value` pairs.
fn read_meta<R: Read>(input: R) -> Result<(CsvMeta, u64, impl Read)> {
    let mut reader = BufReader::new(input);
    let mut meta = CsvMeta::new();
    let mut lines = 0;
    let mut line = String::new();
    loop {
        let buf = reader.fill_buf()?;
        if buf.first() != Some(&b'#') {
            break;
        }
        line.clear();
        reader.read_line(&mut line)?;
        lines += 1;
        let body = line.trim_start_matches('#').trim();
        if let Some((k, v)) = body.split_once('=') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok((meta, lines, reader))
}

fn write_meta<W: Write>(out: &mut W, meta: &CsvMeta) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, row: u64, name: &str) -> Result<&'a str> {
    rec.get(idx).ok_or_else(|| Error::Parse {
        row,
        column: name.to_string(),
        message: "missing field".into(),
    })
}

fn parse_num<T: std::str::FromStr>(s: &str, row: u64, column: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e: T::Err| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("{e}: {s:?}"),
    })
}

fn parse_label(s: &str, row: u64) -> Result<Label> {
    s.trim().parse().map_err(|_| Error::Parse {
        row,
        column: "label".into(),
        message: format!("expected MDD or NC, got {s:?}"),
    })
}

struct PendingEpoch {
    subject: String,
    label: Label,
    index: usize,
    rows: Vec<f64>,
}

impl PendingEpoch {
    fn finish(self, fs: f64) -> Epoch {
        let len = self.rows.len() / N_CHANNELS;
        let flat = Array2::from_shape_vec((len, N_CHANNELS), self.rows).expect("row-major samples");
        Epoch {
            subject_id: self.subject,
            label: self.label,
            fs,
            samples: flat.reversed_axes().as_standard_layout().to_owned(),
            epoch_index: self.index,
        }
    }
}

pub fn load_epochs_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut ds = read_epochs_csv(file)?;
    ds.provenance = Provenance::File {
        path: path.display().to_string(),
    };
    Ok(ds)
}

pub fn read_epochs_csv<R: Read>(input: R) -> Result<Dataset> {
    let (meta, comment_lines, body) = read_meta(input)?;
    let fs = match meta.get("fs") {
        Some(v) => parse_num::<f64>(v, 1, "fs")?,
        None => DEFAULT_FS,
    };
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(body);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let expected: Vec<&str> = EPOCH_KEYS.iter().chain(CHANNELS.iter()).copied().collect();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Schema(format!(
            "epoch CSV header must be {} ({} channels), got {} columns",
            expected.join(","),
            N_CHANNELS,
            got.len()
        )));
    }

    let mut epochs: Vec<Epoch> = Vec::new();
    let mut current: Option<PendingEpoch> = None;
    let mut subjects_done: Vec<String> = Vec::new();
    let mut rec = csv::StringRecord::new();
    let mut line = comment_lines + 1;
    while rdr.read_record(&mut rec).map_err(csv_err)? {
        line += 1;
        let subject = field(&rec, 0, line, "subject_id")?.trim();
        let label = parse_label(field(&rec, 1, line, "label")?, line)?;
        let epoch_index: usize = parse_num(field(&rec, 2, line, "epoch_index")?, line, "epoch_index")?;
        let sample_index: usize = parse_num(field(&rec, 3, line, "sample_index")?, line, "sample_index")?;
        let n_values = rec.len().saturating_sub(EPOCH_KEYS.len());
        if n_values != N_CHANNELS {
            return Err(Error::Schema(format!(
                "epoch {epoch_index} of subject {subject} has {n_values} channel values at line {line}, expected {N_CHANNELS}"
            )));
        }

        let same_epoch = current
            .as_ref()
            .map(|c| c.subject == subject && c.index == epoch_index)
            .unwrap_or(false);
        if !same_epoch {
            if let Some(done) = current.take() {
                if done.subject != subject {
                    if subjects_done.iter().any(|s| s == subject) {
                        return Err(Error::Schema(format!(
                            "rows of subject {subject} are not contiguous (line {line})"
                        )));
                    }
                    subjects_done.push(done.subject.clone());
                }
                epochs.push(done.finish(fs));
            }
            current = Some(PendingEpoch {
                subject: subject.to_string(),
                label,
                index: epoch_index,
                rows: Vec::new(),
            });
        }
        let cur = current.as_mut().expect("epoch in progress");
        if cur.label != label {
            return Err(Error::Schema(format!("subject {subject} changes label at line {line}")));
        }
        let expected_sample = cur.rows.len() / N_CHANNELS;
        if sample_index != expected_sample {
            return Err(Error::Schema(format!(
                "epoch {epoch_index} of subject {subject}: sample_index {sample_index} at line {line}, expected {expected_sample}"
            )));
        }
        for (c, name) in CHANNELS.iter().enumerate() {
            let v: f64 = parse_num(&rec[EPOCH_KEYS.len() + c], line, name)?;
            cur.rows.push(v);
        }
    }
    if let Some(done) = current.take() {
        epochs.push(done.finish(fs));
    }
    Dataset::new(epochs, Provenance::File { path: String::new() })
}

/// Writes the dataset in long form, preceded by `# fs=<rate>` and any extra metadata.
pub fn write_dataset<W: Write>(out: W, ds: &Dataset, extra: &CsvMeta) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let mut meta = extra.clone();
    meta.insert("fs".into(), ds.fs().to_string());
    write_meta(&mut out, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = EPOCH_KEYS.iter().chain(CHANNELS.iter()).copied().collect();
    w.write_record(&header).map_err(csv_err)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for e in &ds.epochs {
        for t in 0..e.len() {
            row.clear();
            row.push(e.subject_id.clone());
            row.push(e.label.to_string());
            row.push(e.epoch_index.to_string());
            row.push(t.to_string());
            row.extend(e.samples.column(t).iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(path: impl AsRef<Path>, ds: &Dataset, extra: &CsvMeta) -> Result<()> {
    write_dataset(File::create(path)?, ds, extra)
}

pub fn write_feature_csv<W: Write>(out: W, fm: &FeatureMatrix, meta: &CsvMeta) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    write_meta(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = FEATURE_KEYS.to_vec();
    header.extend(fm.names.iter().map(String::as_str));
    w.write_record(&header).map_err(csv_err)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..fm.n_rows() {
        row.clear();
        row.push(fm.subjects[i].clone());
        row.push(fm.labels[i].to_string());
        row.push(fm.epoch_index[i].to_string());
        row.extend(fm.values.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_csv<R: Read>(input: R) -> Result<(FeatureMatrix, CsvMeta)> {
    let (meta, comment_lines, body) = read_meta(input)?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(body);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() <= FEATURE_KEYS.len() || cols[..FEATURE_KEYS.len()] != FEATURE_KEYS {
        return Err(Error::Schema(format!(
            "feature CSV header must start with {} followed by feature names",
            FEATURE_KEYS.join(",")
        )));
    }
    let names: Vec<String> = cols[FEATURE_KEYS.len()..].iter().map(|s| s.to_string()).collect();
    let width = names.len();
    let (mut subjects, mut labels, mut epoch_index, mut values) = (vec![], vec![], vec![], vec![]);
    let mut rec = csv::StringRecord::new();
    let mut line = comment_lines + 1;
    while rdr.read_record(&mut rec).map_err(csv_err)? {
        line += 1;
        if rec.len() != width + FEATURE_KEYS.len() {
            return Err(Error::Schema(format!(
                "line {line} has {} fields, expected {}",
                rec.len(),
                width + FEATURE_KEYS.len()
            )));
        }
        subjects.push(rec[0].trim().to_string());
        labels.push(parse_label(&rec[1], line)?);
        epoch_index.push(parse_num(&rec[2], line, "epoch_index")?);
        for (j, name) in names.iter().enumerate() {
            values.push(parse_num::<f64>(&rec[FEATURE_KEYS.len() + j], line, name)?);
        }
    }
    let n = subjects.len();
    let values = Array2::from_shape_vec((n, width), values).expect("rectangular rows");
    let fm = FeatureMatrix::new(names, values, subjects, labels, epoch_index)?;
    Ok((fm, meta))
}

pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<(FeatureMatrix, CsvMeta)> {
    read_feature_csv(File::open(path)?)
}

pub fn save_feature_csv(path: impl AsRef<Path>, fm: &FeatureMatrix, meta: &CsvMeta) -> Result<()> {
    write_feature_csv(File::create(path)?, fm, meta)
}

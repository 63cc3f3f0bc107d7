use std::io::{self, Read, Write};

use super::{EvaluationRecord, Summary};

pub const METRICS_HEADER: [&str; 5] = ["index", "rmse", "adj_r2", "coverage", "nmpiw"];

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Streams records as `index,rmse,adj_r2,coverage,nmpiw` rows; missing
/// metrics are empty cells.
pub struct MetricsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(writer: W) -> csv::Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record(METRICS_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &EvaluationRecord) -> csv::Result<()> {
        self.inner.write_record([
            r.index.to_string(),
            cell(r.rmse),
            cell(r.adj_r2),
            cell(r.coverage),
            cell(r.nmpiw),
        ])
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

/// Parses a metrics CSV written by [`MetricsWriter`].
pub fn read_metrics_csv<R: Read>(reader: R) -> Result<Vec<EvaluationRecord>, csv::Error> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(METRICS_HEADER) {
        return Err(malformed(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let opt = |i: usize| -> Result<Option<f64>, csv::Error> {
            let s = row.get(i).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| malformed(format!("row {}: {:?} is not a number", line + 1, s)))
        };
        let index = row[0]
            .parse()
            .map_err(|_| malformed(format!("row {}: bad index {:?}", line + 1, &row[0])))?;
        out.push(EvaluationRecord {
            index,
            rmse: opt(1)?,
            adj_r2: opt(2)?,
            coverage: opt(3)?,
            nmpiw: opt(4)?,
        });
    }
    Ok(out)
}

fn malformed(msg: String) -> csv::Error {
    csv::Error::from(io::Error::new(io::ErrorKind::InvalidData, msg))
}

/// Writes the summary as `key=value` lines; missing metrics have an empty
/// value.
pub fn write_summary<W: Write>(mut w: W, s: &Summary) -> io::Result<()> {
    writeln!(w, "instances={}", s.instances)?;
    writeln!(w, "predictors={}", s.predictors)?;
    for (prefix, r) in [
        ("cumulative", &s.cumulative),
        ("prequential", &s.prequential),
    ] {
        writeln!(w, "{prefix}_rmse={}", cell(r.rmse))?;
        writeln!(w, "{prefix}_adj_r2={}", cell(r.adj_r2))?;
        writeln!(w, "{prefix}_coverage={}", cell(r.coverage))?;
        writeln!(w, "{prefix}_nmpiw={}", cell(r.nmpiw))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(index: u64) -> EvaluationRecord {
        EvaluationRecord {
            index,
            rmse: Some(0.5),
            adj_r2: None,
            coverage: Some(1.0),
            nmpiw: Some(0.125),
        }
    }

    #[test]
    fn golden_metrics_csv() {
        let mut w = MetricsWriter::new(Vec::new()).unwrap();
        w.write(&rec(1000)).unwrap();
        w.write(&EvaluationRecord {
            rmse: Some(1e-20),
            coverage: None,
            nmpiw: None,
            ..rec(1500)
        })
        .unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(
            text,
            "index,rmse,adj_r2,coverage,nmpiw\n1000,0.5,,1,0.125\n1500,0.00000000000000000001,,,\n"
        );
        let back = read_metrics_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0], rec(1000));
        assert_eq!(back[1].rmse, Some(1e-20));
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_metrics_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_metrics_csv("index,rmse,adj_r2,coverage,nmpiw\nx,1,,,\n".as_bytes()).is_err());
        assert!(
            read_metrics_csv("index,rmse,adj_r2,coverage,nmpiw\n1,abc,,,\n".as_bytes()).is_err()
        );
    }

    #[test]
    fn golden_summary() {
        let s = Summary {
            instances: 10,
            predictors: 2,
            cumulative: rec(10),
            prequential: EvaluationRecord {
                rmse: Some(2.0),
                ..rec(10)
            },
            state_hashes: Vec::new(),
        };
        let mut out = Vec::new();
        write_summary(&mut out, &s).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "instances=10\npredictors=2\n\
             cumulative_rmse=0.5\ncumulative_adj_r2=\ncumulative_coverage=1\ncumulative_nmpiw=0.125\n\
             prequential_rmse=2\nprequential_adj_r2=\nprequential_coverage=1\nprequential_nmpiw=0.125\n"
        );
    }
}

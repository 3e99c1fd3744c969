//! CSV writers with a leading `#` parameter comment.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Formats a value with 17 significant digits.
#[must_use]
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvSink {
    writer: csv::Writer<Box<dyn Write>>,
    columns: usize,
}

impl CsvSink {
    /// Writes to `path`, or standard output when `None`.
    pub fn create(path: Option<&Path>, comment: &str, header: &[&str]) -> io::Result<Self> {
        let raw: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                Box::new(BufWriter::new(File::create(p)?))
            }
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Self::from_writer(raw, comment, header)
    }

    pub fn from_writer(
        mut raw: Box<dyn Write>,
        comment: &str,
        header: &[&str],
    ) -> io::Result<Self> {
        for line in comment.lines() {
            writeln!(raw, "# {line}")?;
        }
        let mut writer = csv::WriterBuilder::new().from_writer(raw);
        writer.write_record(header)?;
        Ok(Self {
            writer,
            columns: header.len(),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let record = csv::ByteRecord::from_iter(fields);
        debug_assert_eq!(record.len(), self.columns);
        self.writer.write_byte_record(&record)?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> io::Result<()> {
        self.row(values.iter().map(|&x| num(x)))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::{Arc, Mutex};

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 6.02e23, -1e-300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn comment_then_header_then_rows() {
        let buf = Shared::default();
        let mut sink = CsvSink::from_writer(Box::new(buf.clone()), "a=1 b=2", &["x", "y"]).unwrap();
        sink.numbers(&[1.0, 2.0]).unwrap();
        sink.row(["label", "3"]).unwrap();
        sink.finish().unwrap();
        let text = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# a=1 b=2");
        assert_eq!(lines[1], "x,y");
        assert_eq!(lines[2], "1.0000000000000000e0,2.0000000000000000e0");
        assert_eq!(lines[3], "label,3");
    }
}

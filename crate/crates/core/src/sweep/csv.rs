//! Sweep results as CSV. Floats are written in shortest round-trip form, so
//! reading a file back reproduces every value bit for bit.

use std::path::Path;

use crate::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "l_over_lc",
    "phi_over_pi",
    "sir_db",
    "snr_db",
    "num_symbols",
    "seed",
    "bit_errors",
    "total_bits",
    "ber",
    "ci_low",
    "ci_high",
];

/// One line of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub l_over_lc: f64,
    pub phi_over_pi: f64,
    pub sir_db: f64,
    pub snr_db: f64,
    pub num_symbols: u64,
    pub seed: u64,
    pub bit_errors: u64,
    pub total_bits: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SweepRow {
    fn fields(&self) -> [String; 11] {
        [
            format!("{:?}", self.l_over_lc),
            format!("{:?}", self.phi_over_pi),
            format!("{:?}", self.sir_db),
            format!("{:?}", self.snr_db),
            self.num_symbols.to_string(),
            self.seed.to_string(),
            self.bit_errors.to_string(),
            self.total_bits.to_string(),
            format!("{:?}", self.ber),
            format!("{:?}", self.ci_low),
            format!("{:?}", self.ci_high),
        ]
    }

    fn parse(record: &::csv::StringRecord) -> std::result::Result<Self, String> {
        if record.len() != CSV_HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                record.len()
            ));
        }
        let float = |i: usize| {
            record[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        let int = |i: usize| {
            record[i]
                .trim()
                .parse::<u64>()
                .map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        Ok(SweepRow {
            l_over_lc: float(0)?,
            phi_over_pi: float(1)?,
            sir_db: float(2)?,
            snr_db: float(3)?,
            num_symbols: int(4)?,
            seed: int(5)?,
            bit_errors: int(6)?,
            total_bits: int(7)?,
            ber: float(8)?,
            ci_low: float(9)?,
            ci_high: float(10)?,
        })
    }
}

pub fn write_rows<W: std::io::Write>(
    rows: &[SweepRow],
    out: W,
) -> std::result::Result<(), ::csv::Error> {
    let mut writer = ::csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(rows, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = ::csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!(
            "{}: unexpected CSV header {:?}",
            path.display(),
            header
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = SweepRow::parse(&record)
            .map_err(|e| Error::Config(format!("{} row {}: {e}", path.display(), line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

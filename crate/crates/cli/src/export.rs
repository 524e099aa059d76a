//! Trace CSV.
//!
//! One header line, then one line per recorded row with the columns of
//! [`COLUMNS`]. Every value is written with 17 significant digits so it parses
//! back to the identical `f64`.

use std::io::{Read, Write};

use batflight::sim::{Trace, TraceRow};

use crate::error::CliError;

pub const COLUMNS: [&str; 42] = [
    "t",
    "r_b_11",
    "r_b_12",
    "r_b_13",
    "r_b_21",
    "r_b_22",
    "r_b_23",
    "r_b_31",
    "r_b_32",
    "r_b_33",
    "p_b_x",
    "p_b_y",
    "p_b_z",
    "theta_l_p",
    "theta_l_m",
    "theta_l_e",
    "theta_l_f",
    "theta_r_p",
    "theta_r_m",
    "theta_r_e",
    "theta_r_f",
    "qd_wx",
    "qd_wy",
    "qd_wz",
    "qd_vx",
    "qd_vy",
    "qd_vz",
    "qd_l_p",
    "qd_l_m",
    "qd_l_e",
    "qd_l_f",
    "qd_r_p",
    "qd_r_m",
    "qd_r_e",
    "qd_r_f",
    "pi_x",
    "pi_y",
    "pi_z",
    "e",
    "roll",
    "pitch",
    "yaw",
];

/// 1-based column of `name`, for plot scripts.
pub fn column(name: &str) -> usize {
    COLUMNS.iter().position(|c| *c == name).expect("known column") + 1
}

pub fn row_values(row: &TraceRow) -> Vec<f64> {
    let mut v = Vec::with_capacity(COLUMNS.len());
    v.push(row.t);
    for i in 0..3 {
        for j in 0..3 {
            v.push(row.rotation[(i, j)]);
        }
    }
    v.extend(row.position.iter());
    v.extend(row.theta_left.as_array());
    v.extend(row.theta_right.as_array());
    v.extend(row.qd.iter());
    v.extend(row.momentum.iter());
    v.push(row.energy);
    v.extend(row.euler);
    v
}

pub fn write_trace<W: Write>(trace: &Trace, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in &trace.rows {
        w.write_record(row_values(row).iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_to_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

/// Parses a trace CSV back into rows of numbers, checking the header.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |e: String| CliError::Parse(format!("trace csv: {e}"));
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(bad("unexpected header".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            rec.iter().map(|f| f.parse::<f64>().map_err(|e| bad(e.to_string()))).collect()
        })
        .collect()
}

//! Trajectory CSV and JSON report envelopes.

use std::io::Write;

use serde::Serialize;

use crate::config::RunConfig;
use crate::integrate::Trajectory;

pub const CSV_HEADER: &str = "t,Y,p,x,r,pi,Ystar,G,mu";

/// Format with 17 significant digits; parsing the text recovers the value
/// exactly.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write the trajectory as CSV and return the number of bytes written.
pub fn emit_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<usize> {
    if traj.is_empty() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "cannot write an empty trajectory",
        ));
    }
    let text = trajectory_csv(traj);
    out.write_all(text.as_bytes())?;
    Ok(text.len())
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(64 + traj.len() * 9 * 24);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for i in 0..traj.len() {
        let st = &traj.states[i];
        let ex = &traj.exogenous[i];
        let row = [traj.times[i], st.y, st.p, st.x, st.r, traj.pi[i], ex.y_star, ex.g, ex.mu];
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&format_f64(*v));
        }
        s.push('\n');
    }
    s
}

/// Every JSON report carries the resolved configuration it was produced from.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

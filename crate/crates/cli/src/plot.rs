//! gnuplot command files that turn `trace.csv` into figures.
//!
//! Each script writes PNGs next to itself; run `gnuplot plot.gp` inside the
//! output directory.

use std::fmt::Write;

use batflight::gait::ManeuverParams;

use crate::export::column;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set terminal pngcairo size 1200,900");
    let _ = writeln!(out, "set key outside right");
    let _ = writeln!(out, "set grid");
    let _ = writeln!(out, "set xlabel 't [s]'");
}

fn series(cols: &[(&str, &str)]) -> String {
    cols.iter()
        .map(|(name, label)| format!("'trace.csv' every ::1 using 1:{} with lines title '{label}'", column(name)))
        .collect::<Vec<_>>()
        .join(", \\\n     ")
}

fn joints(out: &mut String, file: &str) {
    let _ = writeln!(out, "set output '{file}'");
    let _ = writeln!(out, "set multiplot layout 2,1");
    let _ = writeln!(out, "set ylabel 'left joints [rad]'");
    let _ = writeln!(
        out,
        "plot {}",
        series(&[
            ("theta_l_p", "plunge"),
            ("theta_l_m", "mediolateral"),
            ("theta_l_e", "elbow"),
            ("theta_l_f", "feathering")
        ])
    );
    let _ = writeln!(out, "set ylabel 'right joints [rad]'");
    let _ = writeln!(
        out,
        "plot {}",
        series(&[
            ("theta_r_p", "plunge"),
            ("theta_r_m", "mediolateral"),
            ("theta_r_e", "elbow"),
            ("theta_r_f", "feathering")
        ])
    );
    let _ = writeln!(out, "unset multiplot");
}

/// Angular momentum, body velocity and joint angles of a gait run.
pub fn gait_script() -> String {
    let mut out = String::new();
    header(&mut out, "Open-loop gait");
    let _ = writeln!(out, "set output 'momentum.png'");
    let _ = writeln!(out, "set ylabel 'angular momentum [kg m^2/s]'");
    let _ = writeln!(out, "plot {}", series(&[("pi_x", "Pi_x"), ("pi_y", "Pi_y"), ("pi_z", "Pi_z")]));
    let _ = writeln!(out, "set output 'velocity.png'");
    let _ = writeln!(out, "set multiplot layout 2,1");
    let _ = writeln!(out, "set ylabel 'body velocity [m/s]'");
    let _ = writeln!(out, "plot {}", series(&[("qd_vx", "v_x"), ("qd_vy", "v_y"), ("qd_vz", "v_z")]));
    let _ = writeln!(out, "set ylabel 'body rate [rad/s]'");
    let _ = writeln!(out, "plot {}", series(&[("qd_wx", "w_x"), ("qd_wy", "w_y"), ("qd_wz", "w_z")]));
    let _ = writeln!(out, "unset multiplot");
    joints(&mut out, "joints.png");
    out
}

/// Body roll rate against the target profile, plus the attitude.
pub fn perch_script(maneuver: &ManeuverParams) -> String {
    let mut out = String::new();
    header(&mut out, "Perching maneuver");
    let _ = writeln!(out, "t0 = {:.16e}", maneuver.start);
    let _ = writeln!(out, "T = {:.16e}", maneuver.ramp);
    let _ = writeln!(out, "target(t) = (pi/2) * (3.0/T) * (1 - tanh(3.0*(t - t0)/T - 3.0)**2)");
    let _ = writeln!(out, "set output 'roll_rate.png'");
    let _ = writeln!(out, "set ylabel 'roll rate [rad/s]'");
    let _ = writeln!(out, "set xrange [t0 - 0.1:t0 + 2*T + 0.3]");
    let _ = writeln!(
        out,
        "plot 'trace.csv' every ::1 using 1:{} with lines title 'w_x', \\\n     (x >= t0 && x <= t0 + 2*T ? target(x) : 1/0) with lines dashtype 2 title 'target'",
        column("qd_wx")
    );
    let _ = writeln!(out, "set output 'attitude.png'");
    let _ = writeln!(out, "set ylabel 'Euler angles [rad]'");
    let _ = writeln!(out, "plot {}", series(&[("roll", "roll"), ("pitch", "pitch"), ("yaw", "yaw")]));
    let _ = writeln!(out, "set autoscale x");
    joints(&mut out, "joints.png");
    out
}

/// Attitude and joints of the torque-driven run.
pub fn pid_script() -> String {
    let mut out = String::new();
    header(&mut out, "Closed-loop tracking");
    let _ = writeln!(out, "set output 'attitude.png'");
    let _ = writeln!(out, "set ylabel 'Euler angles [rad]'");
    let _ = writeln!(out, "plot {}", series(&[("roll", "roll"), ("pitch", "pitch"), ("yaw", "yaw")]));
    joints(&mut out, "joints.png");
    out
}

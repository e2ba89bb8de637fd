//! CSV logs of cones and viewpoints.
//!
//! Each file starts with a `# schema` comment line followed by one header
//! line. Floats are written in their shortest round-trip decimal form, so
//! a parsed log reproduces the in-memory values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{ComptonCone, SensorPose};
use crate::{Cone, Vec3, Viewpoint};

pub const CONE_HEADER: &str = "t,agent,apex_x,apex_y,apex_z,roll,pitch,yaw,axis_x,axis_y,axis_z,beta";
pub const VIEWPOINT_HEADER: &str = "t,agent,x,y,z,roll,pitch,yaw";
pub const CONE_SCHEMA: &str = "# schema: cone-log v1";
pub const VIEWPOINT_SCHEMA: &str = "# schema: viewpoint-log v1";

pub fn cone_row(c: &Cone) -> String {
    let p = c.apex.position;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        c.timestamp, c.agent_id, p.x, p.y, p.z, c.apex.roll, c.apex.pitch, c.apex.yaw, c.axis.x, c.axis.y, c.axis.z,
        c.opening_angle
    )
}

pub fn viewpoint_row(v: &Viewpoint) -> String {
    let p = v.pose.position;
    format!("{},{},{},{},{},{},{},{}", v.timestamp, v.agent_id, p.x, p.y, p.z, v.pose.roll, v.pose.pitch, v.pose.yaw)
}

pub fn cone_log_header() -> String {
    format!("{CONE_SCHEMA}\n{CONE_HEADER}\n")
}

pub fn viewpoint_log_header() -> String {
    format!("{VIEWPOINT_SCHEMA}\n{VIEWPOINT_HEADER}\n")
}

pub fn cones_to_csv(cones: &[Cone]) -> String {
    let mut out = cone_log_header();
    for c in cones {
        let _ = writeln!(out, "{}", cone_row(c));
    }
    out
}

pub fn viewpoints_to_csv(vps: &[Viewpoint]) -> String {
    let mut out = viewpoint_log_header();
    for v in vps {
        let _ = writeln!(out, "{}", viewpoint_row(v));
    }
    out
}

fn records<'a>(text: &'a str, header: &str, path: &Path) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut seen_header = false;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !seen_header {
            if trimmed != header {
                return Err(Error::Parse { path: path.into(), line: line_no, msg: format!("expected header `{header}`") });
            }
            seen_header = true;
            continue;
        }
        out.push((line_no, trimmed.split(',').collect()));
    }
    Ok(out)
}

fn fields<const N: usize>(cols: &[&str], path: &Path, line: usize) -> Result<(u32, [f64; N])> {
    let err = |msg: String| Error::Parse { path: path.into(), line, msg };
    if cols.len() != N + 1 {
        return Err(err(format!("expected {} columns, got {}", N + 1, cols.len())));
    }
    let agent = cols[1].trim().parse::<u32>().map_err(|e| err(format!("agent `{}`: {e}", cols[1])))?;
    let mut vals = [0.0; N];
    for (k, v) in vals.iter_mut().enumerate() {
        let col = if k == 0 { 0 } else { k + 1 };
        let s = cols[col].trim();
        *v = s.parse::<f64>().map_err(|e| err(format!("column {} `{s}`: {e}", col + 1)))?;
        if !v.is_finite() {
            return Err(err(format!("column {} is not finite", col + 1)));
        }
    }
    Ok((agent, vals))
}

pub fn parse_cones(text: &str, path: &Path) -> Result<Vec<Cone>> {
    records(text, CONE_HEADER, path)?
        .into_iter()
        .map(|(line, cols)| {
            let (agent, v) = fields::<11>(&cols, path, line)?;
            let err = |e: Error| Error::Parse { path: path.into(), line, msg: e.to_string() };
            let pose = SensorPose::new(Vec3::new(v[1], v[2], v[3]), v[4], v[5], v[6]).map_err(err)?;
            ComptonCone::new(pose, Vec3::new(v[7], v[8], v[9]), v[10], v[0], agent).map_err(err)
        })
        .collect()
}

pub fn parse_viewpoints(text: &str, path: &Path) -> Result<Vec<Viewpoint>> {
    records(text, VIEWPOINT_HEADER, path)?
        .into_iter()
        .map(|(line, cols)| {
            let (agent, v) = fields::<7>(&cols, path, line)?;
            let pose = SensorPose::new(Vec3::new(v[1], v[2], v[3]), v[4], v[5], v[6])
                .map_err(|e| Error::Parse { path: path.into(), line, msg: e.to_string() })?;
            if v[0] < 0.0 {
                return Err(Error::Parse { path: path.into(), line, msg: "negative timestamp".into() });
            }
            Ok(Viewpoint { pose, timestamp: v[0], agent_id: agent })
        })
        .collect()
}

pub fn read_cones(path: &Path) -> Result<Vec<Cone>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_cones(&text, path)
}

pub fn read_viewpoints(path: &Path) -> Result<Vec<Viewpoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_viewpoints(&text, path)
}

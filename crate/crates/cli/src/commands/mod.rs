pub mod analyze;
pub mod calibrate;
pub mod report;
pub mod simulate;

use anyhow::Result;
use factorial_screen::MethodKind;

pub fn parse_methods(list: &[String]) -> Result<Vec<MethodKind>> {
    let mut out: Vec<MethodKind> = Vec::new();
    for s in list {
        if s.eq_ignore_ascii_case("all") {
            out.extend(MethodKind::ALL);
        } else {
            out.push(s.trim().parse()?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        anyhow::bail!("no methods selected");
    }
    Ok(out)
}

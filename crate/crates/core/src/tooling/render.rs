//! SVG 1.1 frames, one per configuration along a schedule.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::domain::{CellCoord, Polyomino};
use crate::schedule::{Configuration, Instance, Schedule};

use super::ToolError;

const CELL: i32 = 24;

/// One frame: agents as labeled squares, `moved` cells highlighted.
pub fn render_frame(p: &Polyomino, c: &Configuration, moved: &HashSet<CellCoord>) -> String {
    let (min_x, min_y, w, h) = p.bbox();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}">"#,
        w * CELL,
        h * CELL
    );
    for (i, cell) in p.cells().iter().enumerate() {
        let x = (cell.x - min_x) * CELL;
        let y = (h - 1 - (cell.y - min_y)) * CELL;
        let fill = if moved.contains(cell) { "#f4a261" } else { "#e9ecef" };
        let _ = writeln!(s, r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#495057"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="9" text-anchor="middle" font-family="monospace">{}</text>"#,
            x + CELL / 2,
            y + CELL / 2 + 3,
            c.label_at(i)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `frame_0000.svg` (initial state) through `frame_{makespan}.svg`.
/// Frame `k > 0` highlights the agents moved by step `k`.
pub fn render_svg(inst: &Instance, s: &Schedule, out_dir: &Path) -> Result<Vec<PathBuf>, ToolError> {
    fs::create_dir_all(out_dir)?;
    let p = &inst.polyomino;
    let mut c = inst.start.clone();
    let mut files = Vec::with_capacity(s.makespan() + 1);
    let mut write = |k: usize, c: &Configuration, moved: &HashSet<CellCoord>| -> Result<(), ToolError> {
        let path = out_dir.join(format!("frame_{k:04}.svg"));
        fs::write(&path, render_frame(p, c, moved))?;
        files.push(path);
        Ok(())
    };
    write(0, &c, &HashSet::new())?;
    for (k, step) in s.steps.iter().enumerate() {
        let one = Schedule::new(vec![step.clone()]);
        c = one.replay(p, &c).map_err(|(_, e)| ToolError::BadParameters(format!("step {k}: {e}")))?;
        let moved: HashSet<CellCoord> = step.moves.iter().map(|m| m.to).collect();
        write(k + 1, &c, &moved)?;
    }
    Ok(files)
}

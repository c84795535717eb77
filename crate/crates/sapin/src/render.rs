//! Static SVG snapshot of a grid.
//!
//! One square glyph per cell, coloured by kind. Optionally each glyph is
//! labelled with the activation of a single action wave, and the moves of
//! the last movement phase are drawn as arrows (dashed when blocked).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use sapin_core::grid::{CellKind, Coord};
use sapin_core::propagation::action_wave;

use crate::snapshot::NetworkSnapshot;

const PITCH: i32 = 56;
const MARGIN: i32 = 24;
const GLYPH: i32 = 40;

fn fill(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Input => "#3b7dd8",
        CellKind::Processing => "#9aa3ad",
        CellKind::Output => "#e07b39",
    }
}

fn kind_class(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Input => "input",
        CellKind::Processing => "processing",
        CellKind::Output => "output",
    }
}

fn centre(c: Coord) -> (i32, i32) {
    (
        MARGIN + c.x * PITCH + PITCH / 2,
        MARGIN + c.y * PITCH + PITCH / 2,
    )
}

/// Renders `snap`. With `inputs`, one action wave is run on a copy of the
/// network and every cell is labelled with its total activation.
pub fn render_svg(snap: &NetworkSnapshot, inputs: Option<&[f64]>) -> Result<String> {
    let labels: BTreeMap<u32, f64> = match inputs {
        Some(inputs) => {
            let mut net = snap.restore()?;
            net.reset_immediate_state();
            let wave = action_wave(&mut net, inputs);
            net.cells()
                .iter()
                .map(|c| (c.id, c.imm.total))
                .chain(wave.activations.iter().map(|a| (a.id, a.total)))
                .collect()
        }
        None => BTreeMap::new(),
    };

    let w = 2 * MARGIN + snap.width * PITCH;
    let h = 2 * MARGIN + snap.height * PITCH;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="monospace" font-size="10">"#
    );
    s.push_str(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/></marker></defs>
"##,
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
    );

    for y in 0..snap.height {
        for x in 0..snap.width {
            let _ = writeln!(
                s,
                r##"<rect class="slot" x="{}" y="{}" width="{PITCH}" height="{PITCH}" fill="none" stroke="#e3e6ea"/>"##,
                MARGIN + x * PITCH,
                MARGIN + y * PITCH
            );
        }
    }

    for cell in &snap.cells {
        let (cx, cy) = centre(cell.pos);
        let _ = writeln!(
            s,
            r##"<rect class="cell {}" data-id="{}" x="{}" y="{}" width="{GLYPH}" height="{GLYPH}" rx="4" fill="{}" stroke="#333333"/>"##,
            kind_class(cell.kind),
            cell.id,
            cx - GLYPH / 2,
            cy - GLYPH / 2,
            fill(cell.kind)
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{}" text-anchor="middle">{}</text>"#,
            cy - 4,
            cell.id
        );
        if let Some(v) = labels.get(&cell.id) {
            let _ = writeln!(
                s,
                r#"<text class="value" x="{cx}" y="{}" text-anchor="middle">{v:+.3}</text>"#,
                cy + 10
            );
        }
    }

    for m in &snap.recent_moves {
        let (x1, y1) = centre(m.from);
        let (x2, y2) = centre(m.to);
        let dash = if m.blocked {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r##"<line class="move" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#c0392b" stroke-width="2"{dash} marker-end="url(#arrow)"/>"##
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}">{}x{} grid, {} cells{}</text>"#,
        h - 6,
        snap.width,
        snap.height,
        snap.cells.len(),
        if snap.locked { ", locked" } else { "" }
    );
    s.push_str("</svg>\n");
    Ok(s)
}

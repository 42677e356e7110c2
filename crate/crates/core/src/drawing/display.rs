//! Display lists: the visible geometry regenerated from a module's
//! parametric representation.

use serde::{Deserialize, Serialize};

use super::{Element, ElementBody};
use crate::geom::{Mm, Point};
use crate::po::PoModule;
use crate::table::{layout, BandKind, TableInstance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineType {
    Thin,
    Dashed,
    DashDot,
    #[default]
    Solid,
    Thick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Style {
    pub layer: String,
    pub line_type: LineType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<u8>,
    pub font_height: Mm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    Segment { from: Point, to: Point, style: Style },
    Text { at: Point, text: String, style: Style },
}

impl Primitive {
    pub fn style(&self) -> &Style {
        match self {
            Primitive::Segment { style, .. } | Primitive::Text { style, .. } => style,
        }
    }

    fn shift(&mut self, dx: Mm, dy: Mm) {
        match self {
            Primitive::Segment { from, to, .. } => {
                *from = from.offset(dx, dy);
                *to = to.offset(dx, dy);
            }
            Primitive::Text { at, .. } => *at = at.offset(dx, dy),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DisplayList {
    pub primitives: Vec<Primitive>,
}

impl DisplayList {
    pub fn translated(mut self, dx: Mm, dy: Mm) -> Self {
        self.primitives.iter_mut().for_each(|p| p.shift(dx, dy));
        self
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.primitives.iter().filter_map(|p| match p {
            Primitive::Segment { from, to, .. } => Some((from, to)),
            _ => None,
        })
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.primitives.iter().filter_map(|p| match p {
            Primitive::Text { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }
}

pub const PO_FONT_HEIGHT: Mm = Mm::from_thousandths(3500);
pub const PO_LINE_PITCH: Mm = Mm::from_thousandths(5000);
const CELL_PADDING: Mm = Mm::from_thousandths(1000);

/// Rebuilds the visible geometry of a module. Returns `None` for plain
/// graphics, which have no parametric representation.
pub fn regenerate(element: &Element) -> Option<DisplayList> {
    let origin = element.position;
    let layer = &element.layer;
    match &element.body {
        ElementBody::PoModule(po) => Some(po_display(po, origin, layer)),
        ElementBody::TableModule(t) => Some(table_display(t, origin, layer)),
        ElementBody::AxonoSchemeStub(s) | ElementBody::VkProfileStub(s) => {
            let lines: Vec<String> = s.designations.clone();
            Some(text_block(&lines, origin, layer))
        }
        ElementBody::Line(_) | ElementBody::Text(_) => None,
    }
}

fn text_style(layer: &str, font_height: Mm) -> Style {
    Style { layer: layer.to_string(), line_type: LineType::Solid, color: None, font_height }
}

fn text_block(lines: &[String], origin: Point, layer: &str) -> DisplayList {
    let primitives = lines
        .iter()
        .enumerate()
        .map(|(i, l)| Primitive::Text {
            at: origin.offset(Mm::ZERO, -(PO_LINE_PITCH * i as i64)),
            text: l.clone(),
            style: text_style(layer, PO_FONT_HEIGHT),
        })
        .collect();
    DisplayList { primitives }
}

fn po_display(po: &PoModule, origin: Point, layer: &str) -> DisplayList {
    text_block(po.lines(), origin, layer)
}

/// Table-local coordinates grow downward from the top-left corner; the
/// drawing's y axis points up.
fn to_sheet(origin: Point, p: Point) -> Point {
    Point::new(origin.x + p.x, origin.y - p.y)
}

fn table_display(t: &TableInstance, origin: Point, layer: &str) -> DisplayList {
    let grid = layout(t);
    let mut primitives = Vec::new();
    for s in &grid.segments {
        primitives.push(Primitive::Segment {
            from: to_sheet(origin, s.from),
            to: to_sheet(origin, s.to),
            style: Style { layer: layer.to_string(), line_type: s.line_type, color: None, font_height: Mm::ZERO },
        });
    }
    let line_h = t.kind().options.line_height;
    let default_font = t.kind().options.font_height;
    for c in &grid.cells {
        let Some(cell) = t.cell(&c.path) else { continue };
        let font = cell.style.font_height.unwrap_or(default_font);
        for (i, line) in cell.lines.iter().enumerate() {
            if line.is_empty() {
                continue;
            }
            let at = Point::new(c.rect.x0 + CELL_PADDING, c.rect.y0 + line_h * (i as i64 + 1) - CELL_PADDING);
            primitives.push(Primitive::Text {
                at: to_sheet(origin, at),
                text: line.clone(),
                style: Style { color: cell.style.color, ..text_style(layer, font) },
            });
        }
    }
    for band in &grid.bands {
        match band.kind {
            BandKind::Section(i) => {
                let title = &t.sections()[i].title;
                let at = Point::new(CELL_PADDING, band.y1 - CELL_PADDING);
                primitives.push(Primitive::Text {
                    at: to_sheet(origin, at),
                    text: title.clone(),
                    style: text_style(layer, default_font),
                });
            }
            BandKind::GraphNumbers => {
                let start = t.kind().options.graph_number_start;
                for (k, w) in grid.columns.windows(2).enumerate() {
                    let at = Point::new(w[0] + CELL_PADDING, band.y1 - CELL_PADDING);
                    primitives.push(Primitive::Text {
                        at: to_sheet(origin, at),
                        text: (start + k as u32).to_string(),
                        style: text_style(layer, default_font),
                    });
                }
            }
            BandKind::Header | BandKind::Data(_) => {}
        }
    }
    DisplayList { primitives }
}

//! Line plot of the optimal relative sensitivity against gate error.

use nvsensor_core::OptimizationResult;
use svg::node::element::{Group, Line, Path, Rectangle, Text};
use svg::node::element::path::Data;
use svg::Document;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

fn label(x: f64, y: f64, anchor: &str, text: String) -> Text {
    Text::new(text)
        .set("x", x)
        .set("y", y)
        .set("text-anchor", anchor)
        .set("font-family", "sans-serif")
        .set("font-size", 12)
}

fn line(x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) -> Line {
    Line::new()
        .set("x1", x1)
        .set("y1", y1)
        .set("x2", x2)
        .set("y2", y2)
        .set("stroke", stroke)
        .set("stroke-width", 1)
}

/// `r*` against `ε` on a logarithmic ε axis; the break-even line `r = 1` is
/// dashed. Rows with `ε ≤ 0` cannot be placed on the axis and are skipped.
pub fn figure3_svg(rows: &[OptimizationResult]) -> String {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0)
        .map(|r| (r.epsilon.log10(), r.r_star))
        .collect();
    let (x_lo, x_hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (x_lo, x_hi) = if pts.is_empty() { (-4.0, -1.0) } else { (x_lo.floor(), x_hi.ceil().max(x_lo.floor() + 1.0)) };
    let y_hi = pts.iter().map(|p| p.1).fold(1.0, f64::max).ceil();

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h * (1.0 - y / y_hi);

    let mut axes = Group::new()
        .add(line(LEFT, TOP + plot_h, LEFT + plot_w, TOP + plot_h, "black"))
        .add(line(LEFT, TOP, LEFT, TOP + plot_h, "black"));
    for decade in (x_lo as i32)..=(x_hi as i32) {
        let x = sx(decade as f64);
        axes = axes
            .add(line(x, TOP + plot_h, x, TOP + plot_h + 5.0, "black"))
            .add(label(x, TOP + plot_h + 20.0, "middle", format!("1e{decade}")));
    }
    let y_step = (y_hi / 5.0).ceil().max(1.0);
    let mut y = 0.0;
    while y <= y_hi {
        axes = axes
            .add(line(LEFT - 5.0, sy(y), LEFT, sy(y), "black"))
            .add(label(LEFT - 8.0, sy(y) + 4.0, "end", format!("{y}")));
        y += y_step;
    }
    axes = axes
        .add(label(LEFT + plot_w / 2.0, HEIGHT - 15.0, "middle", "gate error ε".into()))
        .add(
            label(18.0, TOP + plot_h / 2.0, "middle", "optimal relative sensitivity r*".into())
                .set("transform", format!("rotate(-90 18 {})", TOP + plot_h / 2.0)),
        );

    let breakeven = line(LEFT, sy(1.0), LEFT + plot_w, sy(1.0), "gray").set("stroke-dasharray", "4 4");

    let mut doc = Document::new()
        .set("viewBox", (0, 0, WIDTH, HEIGHT))
        .set("width", WIDTH)
        .set("height", HEIGHT)
        .add(Rectangle::new().set("width", WIDTH).set("height", HEIGHT).set("fill", "white"))
        .add(axes)
        .add(breakeven);
    if let Some((first, rest)) = pts.split_first() {
        let mut data = Data::new().move_to((sx(first.0), sy(first.1)));
        for p in rest {
            data = data.line_to((sx(p.0), sy(p.1)));
        }
        doc = doc.add(
            Path::new()
                .set("d", data)
                .set("fill", "none")
                .set("stroke", "steelblue")
                .set("stroke-width", 2),
        );
    }
    doc.to_string()
}

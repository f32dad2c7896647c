//! Prompt text and image attachments for the high-level planner.

use image::{Rgb, RgbImage};

use super::types::{PlannerMode, PlannerQuery};
use crate::error::Error;
use crate::map::{encode_png, palette, render_map, MapOverlay};
use crate::world::SensorFrame;

/// Template used in free waypoint mode.
pub const FREE_WAYPOINT_TEMPLATE: &str = include_str!("../../prompts/free_waypoint.txt");
/// Template used in centroid selection mode.
pub const CENTROID_SELECT_TEMPLATE: &str = include_str!("../../prompts/centroid_select.txt");

pub const MAP_SCALE: u32 = 2;
const IMAGE_ROWS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub name: &'static str,
    pub png: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub text: String,
    pub attachments: Vec<Attachment>,
}

pub fn template(mode: PlannerMode) -> &'static str {
    match mode {
        PlannerMode::CentroidSelect => CENTROID_SELECT_TEMPLATE,
        PlannerMode::FreeWaypoint => FREE_WAYPOINT_TEMPLATE,
    }
}

/// Template for `mode`, with the rejection sentence appended when present.
pub fn prompt_text(mode: PlannerMode, feedback: Option<&str>) -> String {
    let mut text = template(mode).to_owned();
    if let Some(f) = feedback {
        text.push_str("\n## Verification Feedback\nYour previous answer was rejected. ");
        text.push_str(f);
        text.push_str("\nChoose a different next waypoint.\n");
    }
    text
}

/// Segmentation view: one column per ray, image left is robot left, rows run from near range
/// (bottom) to `d_max` (top). Beyond the unobstructed extent the column shows the hit class.
pub fn segmentation_image(frame: &SensorFrame) -> RgbImage {
    let w = frame.width() as u32;
    let d_max = frame.config.d_max;
    let mut img = RgbImage::from_pixel(w, IMAGE_ROWS, palette::FREE);
    for i in 0..frame.width() {
        let col = w - 1 - i as u32;
        for row in 0..IMAGE_ROWS {
            let range = d_max * (IMAGE_ROWS - row) as f64 / IMAGE_ROWS as f64;
            let color = match frame.floor.get(i) {
                Some(fl) if range > fl.extent => {
                    if fl.obstacle { palette::OBSTACLE } else { palette::UNKNOWN }
                }
                Some(fl) if fl.targets.iter().any(|&(a, b)| range >= a && range <= b) => palette::TARGET,
                Some(_) => palette::FREE,
                None => match frame.label[i] {
                    crate::world::Label::Target if range >= frame.depth[i] => palette::TARGET,
                    crate::world::Label::Obstacle if range >= frame.depth[i] => palette::OBSTACLE,
                    _ => palette::FREE,
                },
            };
            img.put_pixel(col, row, color);
        }
    }
    img
}

/// Depth view: brightness falls off with range; no-hit columns are black.
pub fn depth_image(frame: &SensorFrame) -> RgbImage {
    let w = frame.width() as u32;
    let mut img = RgbImage::new(w, IMAGE_ROWS);
    for i in 0..frame.width() {
        let d = frame.depth[i];
        let v = if d.is_finite() { (255.0 * (1.0 - d / frame.config.d_max).clamp(0.0, 1.0)) as u8 } else { 0 };
        for row in 0..IMAGE_ROWS {
            img.put_pixel(w - 1 - i as u32, row, Rgb([v, v, v]));
        }
    }
    img
}

pub fn map_image(q: &PlannerQuery) -> RgbImage {
    let overlay = MapOverlay { robot: Some(q.robot.pose()), trajectory: q.trajectory.to_vec(), chain: q.chain.positions() };
    render_map(&q.grid, &overlay, MAP_SCALE)
}

pub fn render_attachments(q: &PlannerQuery) -> Result<Vec<Attachment>, Error> {
    Ok(vec![
        Attachment { name: "occupancy_map", png: encode_png(&map_image(q))? },
        Attachment { name: "segmentation", png: encode_png(&segmentation_image(&q.frame))? },
        Attachment { name: "depth", png: encode_png(&depth_image(&q.frame))? },
    ])
}

pub fn build_prompt(q: &PlannerQuery) -> Result<Prompt, Error> {
    Ok(Prompt { text: prompt_text(q.mode, q.feedback.as_deref()), attachments: render_attachments(q)? })
}

/** Scanline rasterizer for scenes, encoded as PNG through pngjs. */

import { PNG } from "pngjs";
import { Mark, Scene } from "./scene";
import { GLYPH_H, textPixels, textWidth } from "./font";

function parseColor(c: string): [number, number, number] {
  const m = /^#([0-9a-f]{6})$/i.exec(c);
  if (!m) return [0, 0, 0];
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 255, (v >> 8) & 255, v & 255];
}

class Canvas {
  data: Uint8Array;
  constructor(
    public width: number,
    public height: number,
  ) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  blend(x: number, y: number, rgb: [number, number, number], alpha: number) {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(this.data[i + c] * (1 - alpha) + rgb[c] * alpha);
    }
  }

  disk(cx: number, cy: number, r: number, rgb: [number, number, number]) {
    const lo = Math.floor(-r), hi = Math.ceil(r);
    for (let dy = lo; dy <= hi; dy++) {
      for (let dx = lo; dx <= hi; dx++) {
        if (dx * dx + dy * dy <= r * r) {
          this.blend(Math.round(cx + dx), Math.round(cy + dy), rgb, 1);
        }
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number], w: number) {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1) * 2;
    const half = Math.max(0, (w - 1) / 2);
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      const x = x0 + (x1 - x0) * t;
      const y = y0 + (y1 - y0) * t;
      for (let dy = -Math.ceil(half); dy <= Math.ceil(half); dy++) {
        for (let dx = -Math.ceil(half); dx <= Math.ceil(half); dx++) {
          if (dx * dx + dy * dy <= (half + 0.45) * (half + 0.45)) {
            this.blend(Math.round(x + dx), Math.round(y + dy), rgb, 1);
          }
        }
      }
    }
  }

  polygon(pts: Array<[number, number]>, rgb: [number, number, number], alpha: number) {
    const ys = pts.map((p) => p[1]);
    const y0 = Math.max(0, Math.floor(Math.min(...ys)));
    const y1 = Math.min(this.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = y0; y <= y1; y++) {
      const crossings: number[] = [];
      for (let i = 0; i < pts.length; i++) {
        const [ax, ay] = pts[i];
        const [bx, by] = pts[(i + 1) % pts.length];
        if (ay <= y + 0.5 !== by <= y + 0.5) {
          crossings.push(ax + ((y + 0.5 - ay) * (bx - ax)) / (by - ay));
        }
      }
      crossings.sort((a, b) => a - b);
      for (let k = 0; k + 1 < crossings.length; k += 2) {
        const xa = Math.max(0, Math.round(crossings[k]));
        const xb = Math.min(this.width - 1, Math.round(crossings[k + 1]));
        for (let x = xa; x <= xb; x++) this.blend(x, y, rgb, alpha);
      }
    }
  }

  text(mark: Extract<Mark, { kind: "text" }>) {
    const scale = Math.max(1, Math.round(mark.size / GLYPH_H));
    const w = textWidth(mark.text, scale);
    let x0 = Math.round(mark.x);
    if (mark.anchor === "middle") x0 -= Math.round(w / 2);
    if (mark.anchor === "end") x0 -= w;
    const y0 = Math.round(mark.y) - GLYPH_H * scale + scale; // baseline-ish
    const rgb = parseColor(mark.color);
    for (const [dx, dy] of textPixels(mark.text, scale)) {
      this.blend(x0 + dx, y0 + dy, rgb, 1);
    }
  }
}

export function toPng(scene: Scene): Buffer {
  const cv = new Canvas(scene.width, scene.height);
  for (const m of scene.marks) {
    if (m.kind === "line") {
      const rgb = parseColor(m.color);
      for (let i = 0; i + 1 < m.pts.length; i++) {
        cv.line(m.pts[i][0], m.pts[i][1], m.pts[i + 1][0], m.pts[i + 1][1], rgb, m.width);
      }
    } else if (m.kind === "polygon") {
      cv.polygon(m.pts, parseColor(m.fill), m.opacity);
    } else if (m.kind === "circle") {
      cv.disk(m.x, m.y, m.r, parseColor(m.fill));
    } else {
      cv.text(m);
    }
  }
  const png = new PNG({ width: scene.width, height: scene.height });
  for (let i = 0; i < scene.width * scene.height; i++) {
    png.data[i * 4] = cv.data[i * 3];
    png.data[i * 4 + 1] = cv.data[i * 3 + 1];
    png.data[i * 4 + 2] = cv.data[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  return PNG.sync.write(png, { deflateLevel: 9, deflateStrategy: 0 });
}

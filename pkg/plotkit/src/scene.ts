/**
 * Minimal figure scene: a fixed-size canvas with lines, polygons, circles
 * and text, rendered deterministically to SVG or PNG.  No timestamps, no
 * environment-dependent styling, so a rerun reproduces every byte.
 */

export interface LineMark {
  kind: "line";
  pts: Array<[number, number]>;
  color: string;
  width: number;
  dash?: string;
}

export interface PolygonMark {
  kind: "polygon";
  pts: Array<[number, number]>;
  fill: string;
  opacity: number;
}

export interface CircleMark {
  kind: "circle";
  x: number;
  y: number;
  r: number;
  fill: string;
}

export interface TextMark {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  color: string;
  anchor: "start" | "middle" | "end";
}

export type Mark = LineMark | PolygonMark | CircleMark | TextMark;

export interface Scene {
  width: number;
  height: number;
  marks: Mark[];
}

const FMT = (v: number) => (Math.round(v * 100) / 100).toString();

export function toSvg(scene: Scene): string {
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
      `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
  );
  out.push(`<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>`);
  for (const m of scene.marks) {
    if (m.kind === "line") {
      const d = m.pts.map((p, i) => `${i ? "L" : "M"}${FMT(p[0])} ${FMT(p[1])}`).join("");
      const dash = m.dash ? ` stroke-dasharray="${m.dash}"` : "";
      out.push(
        `<path d="${d}" fill="none" stroke="${m.color}" stroke-width="${m.width}"${dash}/>`,
      );
    } else if (m.kind === "polygon") {
      const pts = m.pts.map((p) => `${FMT(p[0])},${FMT(p[1])}`).join(" ");
      out.push(`<polygon points="${pts}" fill="${m.fill}" fill-opacity="${m.opacity}"/>`);
    } else if (m.kind === "circle") {
      out.push(
        `<circle cx="${FMT(m.x)}" cy="${FMT(m.y)}" r="${m.r}" fill="${m.fill}"/>`,
      );
    } else {
      const anchor =
        m.anchor === "start" ? "start" : m.anchor === "end" ? "end" : "middle";
      out.push(
        `<text x="${FMT(m.x)}" y="${FMT(m.y)}" font-family="monospace" ` +
          `font-size="${m.size}" fill="${m.color}" text-anchor="${anchor}">` +
          escapeXml(m.text) +
          `</text>`,
      );
    }
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

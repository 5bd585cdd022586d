// Dot-strip charts: one labeled row per series, one dot per run, shared
// linear x-axis. Rendered as a standalone SVG string (xmlns included) so
// the export button can serialize any chart as-is.

import { escapeHtml, fmt } from "./format.js";
import { NEUTRAL_DOT } from "./color.js";

export interface StripPoint {
  x: number;
  title: string;
  href?: string;
  color?: string;
  runId?: number;
}

export interface StripRow {
  label: string;
  title?: string;
  href?: string;
  points: StripPoint[];
}

export interface StripOptions {
  width?: number;
  labelWidth?: number;
  rowHeight?: number;
}

interface Domain {
  lo: number;
  hi: number;
  min: number;
  max: number;
}

// shared linear axis padded 5% beyond the data min/max (presentation choice)
function domainOf(rows: StripRow[]): Domain {
  const xs = rows.flatMap((row) => row.points.map((p) => p.x));
  const min = Math.min(...xs);
  const max = Math.max(...xs);
  const span = max - min;
  const pad = span === 0 ? 0.5 : span * 0.05;
  return { lo: min - pad, hi: max + pad, min, max };
}

export function dotStrip(rows: StripRow[], options: StripOptions = {}): string {
  const width = options.width ?? 720;
  const labelWidth = options.labelWidth ?? 190;
  const rowHeight = options.rowHeight ?? 28;
  const axisHeight = 22;
  const height = rows.length * rowHeight + axisHeight;
  if (rows.length === 0 || rows.every((row) => row.points.length === 0)) {
    return `<svg xmlns="http://www.w3.org/2000/svg" class="dot-strip" width="${width}" height="40" viewBox="0 0 ${width} 40" role="img"><text x="8" y="24" class="empty">no runs yet</text></svg>`;
  }
  const domain = domainOf(rows);
  const plotLeft = labelWidth + 8;
  const plotRight = width - 12;
  const sx = (x: number): string =>
    (plotLeft + ((x - domain.lo) / (domain.hi - domain.lo)) * (plotRight - plotLeft)).toFixed(2);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" class="dot-strip" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" role="img">`
  );
  rows.forEach((row, index) => {
    const cy = index * rowHeight + rowHeight / 2;
    const label = escapeHtml(row.label);
    const labelTitle = row.title ? `<title>${escapeHtml(row.title)}</title>` : "";
    const text = `<text x="${labelWidth}" y="${(cy + 4).toFixed(2)}" text-anchor="end" class="row-label">${labelTitle}${label}</text>`;
    parts.push(row.href ? `<a href="${escapeHtml(row.href)}">${text}</a>` : text);
    parts.push(
      `<line x1="${plotLeft}" y1="${cy.toFixed(2)}" x2="${plotRight}" y2="${cy.toFixed(2)}" class="row-line"/>`
    );
    for (const point of row.points) {
      const fill = point.color ?? NEUTRAL_DOT;
      const dataRun = point.runId !== undefined ? ` data-run-id="${point.runId}"` : "";
      const circle = `<circle cx="${sx(point.x)}" cy="${cy.toFixed(2)}" r="5" fill="${fill}" class="dot"${dataRun}><title>${escapeHtml(point.title)}</title></circle>`;
      parts.push(point.href ? `<a href="${escapeHtml(point.href)}">${circle}</a>` : circle);
    }
  });
  const axisY = rows.length * rowHeight + 4;
  parts.push(
    `<line x1="${plotLeft}" y1="${axisY}" x2="${plotRight}" y2="${axisY}" class="axis"/>`,
    `<text x="${sx(domain.min)}" y="${axisY + 14}" text-anchor="middle" class="tick">${fmt(domain.min)}</text>`,
    `<text x="${sx(domain.max)}" y="${axisY + 14}" text-anchor="middle" class="tick">${fmt(domain.max)}</text>`,
    `</svg>`
  );
  return parts.join("");
}

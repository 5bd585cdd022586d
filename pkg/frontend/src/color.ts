// Parameter coloring for flow results: numeric values map linearly onto a
// blue -> red scale spanning the min/max of the runs on screen.

const BLUE: [number, number, number] = [0x21, 0x66, 0xac];
const RED: [number, number, number] = [0xb2, 0x18, 0x2b];

export const NEUTRAL_DOT = "#4477aa"; // uniform color when nothing is mapped
export const MISSING_COLOR = "#999999"; // run without a value for the parameter

function hex(channel: number): string {
  return Math.round(channel).toString(16).padStart(2, "0");
}

export function interpolate(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const rgb = BLUE.map((b, i) => b + ((RED[i] as number) - b) * clamped);
  return `#${hex(rgb[0] as number)}${hex(rgb[1] as number)}${hex(rgb[2] as number)}`;
}

export interface ColorScale {
  min: number;
  max: number;
  color(value: number): string;
}

// A scale over the values actually shown; a single distinct value sits at
// the midpoint rather than inventing a spread.
export function colorScale(values: number[]): ColorScale {
  const min = Math.min(...values);
  const max = Math.max(...values);
  return {
    min,
    max,
    color: (value: number) =>
      max === min ? interpolate(0.5) : interpolate((value - min) / (max - min)),
  };
}

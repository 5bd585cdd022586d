export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

// 0.31666666666666665 -> "0.3167", 60 -> "60", trailing zeros dropped
export function fmt(value: number | null | undefined, digits = 4): string {
  if (value === null || value === undefined) return "—";
  if (!Number.isFinite(value)) return String(value);
  if (Number.isInteger(value)) return String(value);
  return String(parseFloat(value.toFixed(digits)));
}

// headline suffix: "±0.0146", or "±—" when std is not defined (single fold)
export function plusMinus(std: number | null | undefined): string {
  return std === null || std === undefined ? "±—" : `±${fmt(std)}`;
}

export function fmtDate(iso: string): string {
  return iso.slice(0, 10);
}

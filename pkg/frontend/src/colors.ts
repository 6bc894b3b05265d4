// Colour encodings for the agent map, one per simulator:
//   habits     glyph colour: satisfaction gradient, red (0) to green (100)
//   reactance  glyph colour: opinion gradient, blue (0) through green/yellow
//              mid-range to red (1); shape circle = rational, triangle = biased
//   halo       glyph colour by mode: bike green, bus blue, walk yellow, car red;
//              a white ring marks an active halo

export function satisfactionHue(satisfaction: number): number {
  const s = Math.min(100, Math.max(0, satisfaction));
  return 1.2 * s; // 0 -> red (0deg), 100 -> green (120deg)
}

export function satisfactionColor(satisfaction: number): string {
  return `hsl(${satisfactionHue(satisfaction).toFixed(1)}, 75%, 45%)`;
}

export function opinionHue(opinion: number): number {
  const v = Math.min(1, Math.max(0, opinion));
  return 240 * (1 - v); // 0 -> blue (240deg), 1 -> red (0deg)
}

export function opinionColor(opinion: number): string {
  return `hsl(${opinionHue(opinion).toFixed(1)}, 80%, 50%)`;
}

export const MODE_COLORS: Record<string, string> = {
  bike: "#2e9e44",
  bus: "#2b6fd4",
  walk: "#e0b626",
  car: "#d43a2b",
};

export function modeColor(mode: string): string {
  return MODE_COLORS[mode] ?? "#888888";
}

export const HALO_RING = "#ffffff";

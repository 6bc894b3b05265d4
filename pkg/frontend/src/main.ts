// Entry point: connects to the session service, builds the control panel
// from the capabilities message, and drives the map and charts from the
// subscribed frame stream.

import { renderChart } from "./charts.js";
import { buildControls } from "./controls.js";
import { renderMap } from "./map.js";
import type { ScenarioPreset, ServerMessage } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";
import { chartSpecs, controlDescriptors, SessionView } from "./viewmodel.js";

const view = new SessionView();
let ws: WebSocket | null = null;
let renderQueued = false;

const el = {
  presets: document.getElementById("presets") as HTMLSelectElement,
  model: document.getElementById("model") as HTMLSelectElement,
  seed: document.getElementById("seed") as HTMLInputElement,
  create: document.getElementById("create") as HTMLButtonElement,
  play: document.getElementById("play") as HTMLButtonElement,
  pause: document.getElementById("pause") as HTMLButtonElement,
  step: document.getElementById("step") as HTMLButtonElement,
  status: document.getElementById("status") as HTMLSpanElement,
  controls: document.getElementById("controls") as HTMLDivElement,
  monitors: document.getElementById("monitors") as HTMLDivElement,
  map: document.getElementById("map") as HTMLCanvasElement,
  charts: document.getElementById("charts") as HTMLDivElement,
};

let presets: ScenarioPreset[] = [];

async function loadPresets(): Promise<void> {
  const res = await fetch("/api/scenarios");
  presets = (await res.json()) as ScenarioPreset[];
  el.presets.replaceChildren(new Option("custom (pick a model)", ""));
  for (const p of presets) {
    el.presets.append(new Option(`${p.name} - ${p.description}`, p.name));
  }
}

function connect(): Promise<WebSocket> {
  return new Promise((resolve, reject) => {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const sock = new WebSocket(`${proto}://${location.host}/ws`);
    sock.onopen = () => resolve(sock);
    sock.onerror = (e) => reject(e);
    sock.onmessage = (ev) => onMessage(parseServerMessage(ev.data as string));
  });
}

function send(payload: Record<string, unknown>): void {
  ws?.send(JSON.stringify(payload));
}

function sendControl(verb: "set" | "action", path: string, value?: unknown): void {
  const msg: Record<string, unknown> = { type: "control", session: view.session, verb };
  if (verb === "set") {
    msg.path = path;
    msg.value = value;
  } else {
    msg.name = path;
    if (value !== undefined) msg.value = value;
  }
  send(msg);
}

function onMessage(msg: ServerMessage): void {
  view.apply(msg);
  if (msg.type === "created") {
    el.status.textContent = `session ${msg.session} (${msg.capabilities.model}), paused at tick 0`;
    send({ type: "subscribe", session: msg.session });
    rebuildPanels();
  } else if (msg.type === "error") {
    el.status.textContent = `error: ${msg.message}`;
  } else if (msg.type === "frame") {
    scheduleRender();
  }
}

function rebuildPanels(): void {
  if (!view.caps) return;
  const current: Record<string, number | null> = {};
  for (const p of view.caps.params) {
    current[p.path] = (view.lastFrame?.metrics[p.path] as number | undefined) ?? null;
  }
  buildControls(el.controls, controlDescriptors(view.caps.params), sendControl, current);

  el.charts.replaceChildren();
  for (const spec of chartSpecs(view.caps.model, view.caps.population_size)) {
    const canvas = document.createElement("canvas");
    canvas.width = 330;
    canvas.height = 150;
    canvas.dataset.title = spec.title;
    el.charts.append(canvas);
  }
}

function scheduleRender(): void {
  // charts buffer losslessly in the view-model; drawing is throttled to the
  // display refresh
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    draw();
  });
}

function draw(): void {
  if (!view.caps || !view.lastFrame) return;
  el.status.textContent = `session ${view.session} (${view.caps.model}), tick ${view.lastFrame.tick}`;
  const mapCtx = el.map.getContext("2d");
  if (mapCtx) renderMap(mapCtx, view.lastFrame, view.caps.model, view.caps.world);

  const specs = chartSpecs(view.caps.model, view.caps.population_size);
  const canvases = el.charts.querySelectorAll("canvas");
  specs.forEach((spec, i) => {
    const ctx = (canvases[i] as HTMLCanvasElement | undefined)?.getContext("2d");
    if (ctx) renderChart(ctx, spec, view.ticks, view.series);
  });

  el.monitors.replaceChildren();
  for (const m of view.monitors()) {
    const box = document.createElement("div");
    box.className = "monitor";
    const label = document.createElement("span");
    label.textContent = m.label;
    const value = document.createElement("strong");
    value.textContent = m.value === null ? "-" : (Number.isInteger(m.value) ? String(m.value) : m.value.toFixed(3));
    box.append(label, value);
    el.monitors.append(box);
  }
}

async function createSession(): Promise<void> {
  if (!ws || ws.readyState !== WebSocket.OPEN) ws = await connect();
  const preset = presets.find((p) => p.name === el.presets.value);
  const model = preset ? preset.model : el.model.value;
  const overrides = preset ? preset.overrides : {};
  const seed = Number(el.seed.value) || (preset ? preset.seed : 42);
  send({ type: "create", model, overrides, seed });
}

el.create.addEventListener("click", () => void createSession());
el.play.addEventListener("click", () => send({ type: "control", session: view.session, verb: "play" }));
el.pause.addEventListener("click", () => send({ type: "control", session: view.session, verb: "pause" }));
el.step.addEventListener("click", () => send({ type: "control", session: view.session, verb: "step", n: 1 }));
el.presets.addEventListener("change", () => {
  const preset = presets.find((p) => p.name === el.presets.value);
  if (preset) el.model.value = preset.model;
});

void loadPresets();

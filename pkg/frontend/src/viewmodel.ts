// Session view-model: pure state, no DOM.  All truth lives server-side; this
// class only accumulates the frame stream (deduplicated by tick so a
// reconnect never doubles chart points) and derives chart series and monitor
// values from the metrics the server sent.

import type { Capabilities, FrameMessage, ModelKind, ParamSpec, ServerMessage } from "./protocol.js";

export interface ControlDescriptor {
  path: string;
  kind: "slider" | "switch" | "button";
  label: string;
  min: number;
  max: number;
  step: number;
  takesValue: boolean;
}

export function controlDescriptors(params: ParamSpec[]): ControlDescriptor[] {
  return params.map((p) => {
    const min = p.min ?? 0;
    const max = p.max ?? 100;
    return {
      path: p.path,
      kind: p.kind === "number" ? "slider" : p.kind === "toggle" ? "switch" : "button",
      label: p.label || p.path,
      min,
      max,
      step: max - min <= 2 ? 0.01 : 1,
      takesValue: p.takes_value ?? false,
    };
  });
}

export interface ChartSpec {
  title: string;
  yMax: number; // y axis always starts at 0
  series: { metric: string; color: string; dash?: boolean }[];
}

export function chartSpecs(model: ModelKind, population: number): ChartSpec[] {
  if (model === "habits") {
    return [
      {
        title: "modal split",
        yMax: 1,
        series: [
          { metric: "bike_share", color: "#2e9e44" },
          { metric: "car_share", color: "#d43a2b" },
        ],
      },
      {
        title: "mean satisfaction per mode",
        yMax: 100,
        series: [
          { metric: "mean_satisfaction_bike", color: "#2e9e44" },
          { metric: "mean_satisfaction_car", color: "#d43a2b" },
        ],
      },
      {
        title: "happy / unhappy users",
        yMax: population,
        series: [
          { metric: "happy_count_bike", color: "#2e9e44" },
          { metric: "unhappy_count_bike", color: "#2e9e44", dash: true },
          { metric: "happy_count_car", color: "#d43a2b" },
          { metric: "unhappy_count_car", color: "#d43a2b", dash: true },
        ],
      },
      {
        title: "decision kind",
        yMax: population,
        series: [
          { metric: "rational_count", color: "#2b6fd4" },
          { metric: "routine_count", color: "#8a3fc4" },
        ],
      },
    ];
  }
  if (model === "reactance") {
    return [
      {
        title: "message efficiency (%)",
        yMax: 100,
        series: [
          { metric: "positive_pct", color: "#2b6fd4" },
          { metric: "convinced_pct", color: "#e0569e" },
          { metric: "negative_pct", color: "#e08626" },
        ],
      },
      {
        title: "opinions vs message",
        yMax: 1,
        series: [
          { metric: "message", color: "#8a3fc4" },
          { metric: "mean_opinion", color: "#e0569e" },
          { metric: "mean_opinion_rational", color: "#2e9e44" },
          { metric: "mean_opinion_susceptible", color: "#e08626" },
        ],
      },
      {
        title: "rational opinions (min/mean/max)",
        yMax: 1,
        series: [
          { metric: "mean_opinion_rational", color: "#2e9e44" },
          { metric: "min_opinion_rational", color: "#2e9e44", dash: true },
          { metric: "max_opinion_rational", color: "#2e9e44", dash: true },
        ],
      },
      {
        title: "biased opinions (min/mean/max)",
        yMax: 1,
        series: [
          { metric: "mean_opinion_susceptible", color: "#e08626" },
          { metric: "min_opinion_susceptible", color: "#e08626", dash: true },
          { metric: "max_opinion_susceptible", color: "#e08626", dash: true },
        ],
      },
    ];
  }
  const modes = ["car", "bike", "bus", "walk"] as const;
  const modeColors: Record<string, string> = {
    car: "#d43a2b", bike: "#2e9e44", bus: "#2b6fd4", walk: "#e0b626",
  };
  return [
    {
      title: "modal split, rational",
      yMax: 1,
      series: modes.map((m) => ({ metric: `share_rational_${m}`, color: modeColors[m] })),
    },
    {
      title: "modal split, biased",
      yMax: 1,
      series: modes.map((m) => ({ metric: `share_biased_${m}`, color: modeColors[m] })),
    },
    {
      title: "satisfaction, rational",
      yMax: 100,
      series: modes.map((m) => ({ metric: `mean_satisfaction_rational_${m}`, color: modeColors[m] })),
    },
    {
      title: "satisfaction, biased",
      yMax: 100,
      series: modes.map((m) => ({ metric: `mean_satisfaction_biased_${m}`, color: modeColors[m] })),
    },
  ];
}

export function monitorSpecs(model: ModelKind): { metric: string; label: string }[] {
  if (model === "habits") {
    return [
      { metric: "rational_count", label: "deciding rationally" },
      { metric: "routine_count", label: "deciding routinely" },
      { metric: "mean_habit_strength_bike", label: "bike habit strength" },
      { metric: "mean_habit_strength_car", label: "car habit strength" },
    ];
  }
  if (model === "reactance") {
    return [
      { metric: "convinced_count", label: "convinced" },
      { metric: "positive_count", label: "positive target" },
      { metric: "negative_count", label: "negative target" },
      { metric: "message", label: "message" },
    ];
  }
  return [
    { metric: "mark_users_car", label: "car mark (users)" },
    { metric: "mark_nonusers_car", label: "car mark (non-users)" },
    { metric: "mean_satisfaction_rational", label: "satisfaction, rational" },
    { metric: "mean_satisfaction_biased", label: "satisfaction, biased" },
  ];
}

export class SessionView {
  session = "";
  caps: Capabilities | null = null;
  ticks: number[] = [];
  series = new Map<string, (number | null)[]>();
  lastFrame: FrameMessage | null = null;
  lastError = "";

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "created":
        this.session = msg.session;
        this.caps = msg.capabilities;
        this.ticks = [];
        this.series.clear();
        this.lastFrame = null;
        for (const m of msg.capabilities.metrics) this.series.set(m, []);
        break;
      case "frame":
        this.applyFrame(msg);
        break;
      case "error":
        this.lastError = msg.message;
        break;
      default:
        break;
    }
  }

  private applyFrame(frame: FrameMessage): void {
    const last = this.ticks.length ? this.ticks[this.ticks.length - 1] : -1;
    if (frame.tick <= last) {
      // replayed or duplicated tick (reconnect): keep the fresher payload but
      // never append a second chart point
      if (frame.tick === last) this.lastFrame = frame;
      return;
    }
    this.ticks.push(frame.tick);
    for (const [name, values] of this.series) {
      const v = frame.metrics[name];
      values.push(v === undefined ? null : v);
    }
    this.lastFrame = frame;
  }

  monitors(): { label: string; value: number | null }[] {
    if (!this.caps || !this.lastFrame) return [];
    return monitorSpecs(this.caps.model).map(({ metric, label }) => ({
      label,
      value: this.lastFrame!.metrics[metric] ?? null,
    }));
  }
}

// DOM control panel generated from the server's capabilities message; the UI
// never hardcodes per-model parameter lists.

import type { ControlDescriptor } from "./viewmodel.js";

export type SendControl = (verb: "set" | "action", path: string, value?: unknown) => void;

export function buildControls(
  root: HTMLElement,
  descriptors: ControlDescriptor[],
  send: SendControl,
  current: Record<string, number | null>,
): void {
  root.replaceChildren();
  for (const d of descriptors) {
    const row = document.createElement("div");
    row.className = "control-row";
    row.dataset.path = d.path;

    if (d.kind === "slider") {
      const label = document.createElement("label");
      label.textContent = d.label;
      const value = document.createElement("span");
      value.className = "control-value";
      const input = document.createElement("input");
      input.type = "range";
      input.min = String(d.min);
      input.max = String(d.max);
      input.step = String(d.step);
      const cur = current[d.path];
      input.value = String(cur ?? d.min);
      value.textContent = input.value;
      input.addEventListener("input", () => {
        value.textContent = input.value;
      });
      input.addEventListener("change", () => {
        send("set", d.path, Number(input.value));
      });
      row.append(label, input, value);
    } else if (d.kind === "switch") {
      const label = document.createElement("label");
      const input = document.createElement("input");
      input.type = "checkbox";
      input.checked = Boolean(current[d.path]);
      input.addEventListener("change", () => {
        send("set", d.path, input.checked);
      });
      label.append(input, document.createTextNode(" " + d.label));
      row.append(label);
    } else {
      const button = document.createElement("button");
      button.textContent = d.label;
      if (d.takesValue) {
        const amount = document.createElement("input");
        amount.type = "number";
        amount.value = "10";
        amount.className = "control-amount";
        button.addEventListener("click", () => {
          send("action", d.path, Number(amount.value));
        });
        row.append(button, amount);
      } else {
        button.addEventListener("click", () => send("action", d.path));
        row.append(button);
      }
    }
    root.append(row);
  }
}

import { ApiClient } from "./api.js";
import { AnnotationApp } from "./app.js";

const TOKEN_KEY = "annotator-token";

function mount(root: HTMLElement, token: string): void {
  sessionStorage.setItem(TOKEN_KEY, token);
  const api = new ApiClient(window.location.origin, token);
  const app = new AnnotationApp(root, api);
  void app.start();
}

function renderTokenPrompt(root: HTMLElement): void {
  root.textContent = "";
  const form = document.createElement("form");
  form.className = "token-form";
  const label = document.createElement("label");
  label.textContent = "Annotator token";
  const input = document.createElement("input");
  input.type = "password";
  input.autocomplete = "off";
  label.appendChild(input);
  form.appendChild(label);
  const go = document.createElement("button");
  go.type = "submit";
  go.textContent = "Start annotating";
  form.appendChild(go);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (input.value.trim()) mount(root, input.value.trim());
  });
  root.appendChild(form);
}

const root = document.getElementById("app");
if (root) {
  const saved = sessionStorage.getItem(TOKEN_KEY);
  if (saved) mount(root, saved);
  else renderTokenPrompt(root);
}

import { ApiClient } from "./api.js";
import { mount } from "./ui.js";

function serviceBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "http://127.0.0.1:8000";
}

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
mount(root, new ApiClient(serviceBaseUrl()));

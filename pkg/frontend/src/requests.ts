// Approval workspace: pending list, request detail, Approve / Reject buttons
// below the text. Reject demands a reason before it ever reaches the server;
// if something slips through anyway, the server's REASON_REQUIRED surfaces.

import { ApiClient, ApiError, RequestRecord } from "./api";
import { messageFor } from "./errors";

export class RequestConsole {
  private api: ApiClient;
  private root: HTMLElement;
  private selected: RequestRecord | null = null;
  requests: RequestRecord[] = [];

  constructor(api: ApiClient, root: HTMLElement) {
    this.api = api;
    this.root = root;
  }

  async refresh(): Promise<void> {
    this.requests = await this.api.listRequests();
    this.render();
  }

  private render(): void {
    this.root.innerHTML = "";
    const list = document.createElement("ul");
    list.className = "request-list";
    for (const request of this.requests) {
      const item = document.createElement("li");
      item.dataset.id = request.id;
      const chip = document.createElement("span");
      chip.className = `state-chip state-${request.state}`;
      chip.textContent = request.state;
      item.append(
        document.createTextNode(`${request.id} [${request.kind}] `), chip);
      item.addEventListener("click", () => this.select(request.id));
      list.appendChild(item);
    }
    this.root.appendChild(list);
    const detail = document.createElement("div");
    detail.className = "request-detail";
    this.root.appendChild(detail);
    if (this.selected) this.renderDetail(detail);
  }

  select(id: string): void {
    this.selected = this.requests.find((r) => r.id === id) ?? null;
    this.render();
  }

  private renderDetail(container: HTMLElement): void {
    const request = this.selected!;
    const text = document.createElement("p");
    text.className = "request-text";
    text.textContent = request.text;
    const requester = document.createElement("p");
    requester.className = "request-requester";
    requester.textContent =
      `from ${request.requester_id} (level ${request.requester_level})`;
    const reason = document.createElement("textarea");
    reason.className = "reject-reason";
    reason.placeholder = "Reason for rejection";
    const error = document.createElement("p");
    error.className = "inline-error";
    const approve = document.createElement("button");
    approve.className = "approve";
    approve.textContent = "Approve";
    approve.addEventListener("click", () => void this.submit("approve", reason.value, error));
    const reject = document.createElement("button");
    reject.className = "reject";
    reject.textContent = "Reject";
    reject.addEventListener("click", () => void this.submit("reject", reason.value, error));
    container.append(text, requester, reason, approve, reject, error);
  }

  async submit(verdict: "approve" | "reject", reason: string,
               errorOut: HTMLElement): Promise<void> {
    if (!this.selected) return;
    if (verdict === "reject" && !reason.trim()) {
      // mirrors the server's rule without asking it
      errorOut.textContent = messageFor("REASON_REQUIRED");
      errorOut.dataset.code = "REASON_REQUIRED";
      return;
    }
    try {
      await this.api.decide(this.selected.id, verdict, reason || undefined);
      await this.refresh();
      this.select(this.selected.id);
    } catch (exc) {
      if (exc instanceof ApiError) {
        errorOut.textContent = messageFor(exc.code, exc.message);
        errorOut.dataset.code = exc.code;
        return;
      }
      throw exc;
    }
  }
}

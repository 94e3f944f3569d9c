// Single-page shell. Navigation is discovered from the server's capability
// list; hiding an entry is cosmetic, the server stays the enforcer. Every
// page carries a Help affordance backed by the gateway's help content.

import { ApiClient, ApiError, Capabilities } from "./api";
import { messageFor } from "./errors";
import { FloorPlanView } from "./floorplan";
import { RequestConsole } from "./requests";
import { ViewState } from "./state";
import { EMPTY_SELECTION_MESSAGE, renderTable, selectedIds } from "./table";

const ENTITY_PAGES: [string, string, string][] = [
  // [page key, route name needed, api path segment]
  ["assets", "assets_list", "assets"],
  ["licenses", "licenses_list", "licenses"],
  ["locations", "locations_list", "locations"],
  ["persons", "persons_list", "persons"],
  ["faculties", "faculties_list", "faculties"],
  ["departments", "departments_list", "departments"],
];

export class App {
  api: ApiClient;
  state: ViewState;
  root: HTMLElement;
  caps: Capabilities | null = null;

  constructor(api: ApiClient, root: HTMLElement,
              state: ViewState = new ViewState()) {
    this.api = api;
    this.root = root;
    this.state = state;
  }

  async start(): Promise<void> {
    this.renderLogin();
  }

  private allowed(routeName: string): boolean {
    return !!this.caps?.routes.some((r) => r.name === routeName);
  }

  // ---------------------------------------------------------------- login

  renderLogin(message = ""): void {
    this.state.page = "login";
    this.root.innerHTML = `
      <div class="login-box">
        <h1>University Inventory</h1>
        <form class="login-form">
          <input name="username" placeholder="username (8 characters)" />
          <input name="password" type="password" placeholder="password" />
          <button type="submit">Log in</button>
        </form>
        <p class="login-error">${message}</p>
        <p class="language-menu"></p>
        <a href="#" class="help-link">Help</a>
      </div>`;
    void this.api.language().then((lang) => {
      const menu = this.root.querySelector(".language-menu")!;
      menu.textContent = `Language: ${lang.languages.join(", ")}`;
    });
    this.wireHelp("session");
    const form = this.root.querySelector<HTMLFormElement>(".login-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      void this.doLogin(String(data.get("username") ?? ""),
                        String(data.get("password") ?? ""));
    });
  }

  async doLogin(username: string, password: string): Promise<void> {
    try {
      const result = await this.api.login(username, password);
      if (result.pending) {
        this.renderRoleChoice(result.role_ids);
        return;
      }
      await this.enter();
    } catch (exc) {
      if (exc instanceof ApiError) {
        this.renderLogin(messageFor(exc.code, exc.message));
        return;
      }
      throw exc;
    }
  }

  renderRoleChoice(roleIds: string[]): void {
    this.root.innerHTML = `<div class="role-choice"><h2>Pick a role for this
      session</h2><ul class="role-list"></ul></div>`;
    const list = this.root.querySelector(".role-list")!;
    for (const roleId of roleIds) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = roleId;
      button.addEventListener("click", () => {
        void this.api.chooseRole(roleId).then(() => this.enter());
      });
      item.appendChild(button);
      list.appendChild(item);
    }
  }

  async enter(): Promise<void> {
    this.caps = await this.api.capabilities();
    this.state.personId = this.caps.person_id;
    this.state.activeRoleId = this.caps.active_role_id;
    this.renderShell();
    await this.showPage("profile");
  }

  // ---------------------------------------------------------------- shell

  renderShell(): void {
    this.root.innerHTML = `
      <div class="shell">
        <nav class="sidebar"><h2>Inventory</h2><ul class="nav"></ul></nav>
        <main class="content">
          <header class="topbar">
            <span class="page-title"></span>
            <span>
              <a href="#" class="help-link">Help</a>
              <button class="logout">Logout</button>
            </span>
          </header>
          <div class="page"></div>
          <div class="help-panel" style="display:none"></div>
        </main>
      </div>`;
    const nav = this.root.querySelector(".nav")!;
    const entries: [string, string][] = [["profile", "My profile"]];
    for (const [page, route] of ENTITY_PAGES.map(
      ([p, r]) => [p, r] as [string, string])) {
      if (this.allowed(route)) entries.push([page, page]);
    }
    entries.push(["requests", "Requests"]);
    if (this.allowed("search_basic")) entries.push(["search", "Search"]);
    if (this.allowed("reports_capacity")) entries.push(["reports", "Reports"]);
    if (this.allowed("floorplan_list")) entries.push(["floorplan", "Floor plan"]);
    if (this.allowed("audit_records")) entries.push(["audit", "Auditing"]);
    for (const [page, label] of entries) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.dataset.page = page;
      link.textContent = label;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void this.showPage(page);
      });
      item.appendChild(link);
      nav.appendChild(item);
    }
    this.root.querySelector(".logout")!.addEventListener("click", () => {
      void this.api.logout().then(() => this.renderLogin("Logged out successfully"));
    });
  }

  private page(): HTMLElement {
    return this.root.querySelector(".page")!;
  }

  async showPage(page: string): Promise<void> {
    this.state.page = page;
    const title = this.root.querySelector(".page-title");
    if (title) title.textContent = page;
    this.wireHelp(this.helpKeyFor(page));
    const target = this.page();
    target.innerHTML = "";
    if (page === "profile") return this.showProfile(target);
    if (page === "requests") return this.showRequests(target);
    if (page === "search") return this.showSearch(target);
    if (page === "reports") return this.showReports(target);
    if (page === "floorplan") return this.showFloorplanChooser(target);
    if (page === "audit") return this.showAudit(target);
    const entity = ENTITY_PAGES.find(([key]) => key === page);
    if (entity) return this.showEntityTable(target, entity[2]);
    target.textContent = "Unknown page";
  }

  private helpKeyFor(page: string): string {
    if (page === "faculties" || page === "departments") return "faculties";
    if (page === "login") return "session";
    return page;
  }

  wireHelp(pageKey: string): void {
    const link = this.root.querySelector<HTMLAnchorElement>(".help-link");
    if (!link) return;
    link.onclick = (event) => {
      event.preventDefault();
      void this.api.help(pageKey).then((help) => {
        let panel = this.root.querySelector<HTMLElement>(".help-panel");
        if (!panel) {
          panel = document.createElement("div");
          panel.className = "help-panel";
          this.root.appendChild(panel);
        }
        panel.style.display = "block";
        panel.innerHTML = `<h3>${help.title}</h3><ul>${
          help.functions.map((f) => `<li>${f}</li>`).join("")
        }</ul><button class="close-help">Close</button>`;
        panel.querySelector(".close-help")!
          .addEventListener("click", () => { panel!.style.display = "none"; });
      });
    };
  }

  // ---------------------------------------------------------------- pages

  async showEntityTable(target: HTMLElement, kind: string,
                        page = 1): Promise<void> {
    const prefs = this.state.tablePrefs(kind);
    const data = await this.api.listEntities(kind, page, prefs.pageSize);
    const message = document.createElement("p");
    message.className = "table-message";
    const holder = document.createElement("div");
    target.innerHTML = "";
    if (this.allowed(`${kind}_delete`)) {
      const del = document.createElement("button");
      del.className = "delete-selected";
      del.textContent = "Delete Selected";
      del.addEventListener("click", () => {
        const ids = selectedIds(holder);
        if (!ids.length) {
          message.textContent = EMPTY_SELECTION_MESSAGE;
          return;
        }
        void this.api.deleteRecords(kind, ids)
          .then(() => this.showEntityTable(target, kind, page))
          .catch((exc: ApiError) => {
            message.textContent = messageFor(exc.code, exc.message);
          });
      });
      target.appendChild(del);
    }
    target.append(message, holder);
    renderTable(holder, {
      columns: data.columns,
      hiddenColumns: prefs.hiddenColumns,
      rows: data.rows,
      total: data.total,
      page: data.page,
      pageSize: prefs.pageSize,
      selectable: true,
      onToggleColumn: (column) => {
        this.state.toggleColumn(kind, column);
        void this.showEntityTable(target, kind, page);
      },
      onPageChange: (next) => void this.showEntityTable(target, kind, next),
      onPageSizeChange: (size) => {
        this.state.setPageSize(kind, size);
        void this.showEntityTable(target, kind, 1);
      },
      onRowClick: (id) => void this.showDetail(target, kind, id),
    });
  }

  async showDetail(target: HTMLElement, kind: string, id: string): Promise<void> {
    const record = await this.api.detail(kind, id);
    const panel = document.createElement("pre");
    panel.className = "record-detail";
    panel.textContent = JSON.stringify(record, null, 2);
    const back = document.createElement("button");
    back.textContent = "Back";
    back.addEventListener("click", () => void this.showEntityTable(target, kind));
    target.innerHTML = "";
    target.append(back, panel);
  }

  async showProfile(target: HTMLElement): Promise<void> {
    const profile = await this.api.profile();
    target.innerHTML = `
      <h2>${profile.person.name || profile.person.username}</h2>
      <p>roles: ${profile.roles.map((r: any) => r.name).join(", ") || "none"}</p>
      <h3>Assigned assets (${profile.assigned_assets.length})</h3>
      <h3>Assigned locations (${profile.assigned_locations.length})</h3>
      <h3>Borrowed assets (${profile.borrowed_assets.length})</h3>
      <h3>Borrowed licenses (${profile.borrowed_licenses.length})</h3>`;
  }

  async showRequests(target: HTMLElement): Promise<void> {
    const form = document.createElement("form");
    form.className = "new-request";
    form.innerHTML = `
      <select name="kind">
        <option value="reparation">report a problem / bug</option>
        <option value="acquisition">general request (acquisition)</option>
        <option value="elimination">general request (elimination)</option>
      </select>
      <input name="text" placeholder="describe the request" />
      <button type="submit">Submit</button>
      <span class="request-error"></span>`;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      void this.api
        .submitRequest(String(data.get("kind")), String(data.get("text") ?? ""))
        .then(() => console_.refresh())
        .catch((exc: ApiError) => {
          form.querySelector(".request-error")!.textContent =
            messageFor(exc.code, exc.message);
        });
    });
    const holder = document.createElement("div");
    target.append(form, holder);
    const console_ = new RequestConsole(this.api, holder);
    await console_.refresh();
  }

  async showSearch(target: HTMLElement): Promise<void> {
    target.innerHTML = `
      <form class="search-form">
        <input name="query" placeholder="search query" />
        <label><input type="checkbox" name="advanced" /> advanced (AND/OR/NOT)</label>
        <button type="submit">Search</button>
      </form>
      <p class="search-message"></p>
      <div class="search-results"></div>`;
    const form = target.querySelector<HTMLFormElement>(".search-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const query = String(data.get("query") ?? "");
      const advanced = data.get("advanced") !== null;
      const run = advanced
        ? this.api.searchAdvanced(query)
        : this.api.searchBasic(query);
      void run.then((result) => {
        const message = target.querySelector(".search-message")!;
        message.textContent = result.found ? `${result.total} match(es)`
          : result.message;
        const out = target.querySelector(".search-results")!;
        out.innerHTML = "";
        for (const [category, rows] of Object.entries(result.groups)) {
          const block = document.createElement("div");
          block.innerHTML = `<h3>${category} (${(rows as any[]).length})</h3>`;
          out.appendChild(block);
        }
      }).catch((exc: ApiError) => {
        target.querySelector(".search-message")!.textContent =
          messageFor(exc.code, exc.message);
      });
    });
  }

  async showReports(target: HTMLElement): Promise<void> {
    target.innerHTML = `
      <form class="report-form">
        <select name="location_type">
          <option value="teaching_lab">teaching lab</option>
          <option value="research_lab">research lab</option>
          <option value="office">office</option>
        </select>
        <select name="comparison">
          <option value="chairs">chairs</option>
          <option value="tables">tables</option>
          <option value="pc">PC</option>
          <option value="students">students</option>
        </select>
        <button type="submit">Create report</button>
        <span class="report-error"></span>
      </form>
      <div class="report-out"></div>`;
    const form = target.querySelector<HTMLFormElement>(".report-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      void this.api
        .capacityReport(String(data.get("location_type")),
                        String(data.get("comparison")))
        .then((rows) => {
          const out = target.querySelector(".report-out")!;
          out.innerHTML = `<table class="report"><tr><th>location</th>
            <th>capacity</th><th>counted</th><th>difference</th></tr>${
            rows.map((r: any) => `<tr><td>${r.location_number}</td>
              <td>${r.capacity}</td><td>${r.counted}</td>
              <td>${r.difference}</td></tr>`).join("")}</table>`;
        })
        .catch((exc: ApiError) => {
          form.querySelector(".report-error")!.textContent =
            messageFor(exc.code, exc.message);
        });
    });
  }

  async showFloorplanChooser(target: HTMLElement): Promise<void> {
    const plans = await this.api.floorplanList();
    target.innerHTML = `<h2>Locations with a plan</h2><ul class="plan-list"></ul>
      <div class="plan-holder"></div>`;
    const list = target.querySelector(".plan-list")!;
    for (const plan of plans) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = plan.location_number;
      button.addEventListener("click", () => {
        const holder = target.querySelector<HTMLElement>(".plan-holder")!;
        void new FloorPlanView(this.api, holder, plan.id).refresh();
      });
      item.appendChild(button);
      list.appendChild(item);
    }
  }

  async showAudit(target: HTMLElement): Promise<void> {
    target.innerHTML = `
      <form class="audit-login">
        <p>Log in once more to open the auditing session.</p>
        <input name="password" type="password" placeholder="password" />
        <button type="submit">Open audit session</button>
        <span class="audit-error"></span>
      </form>
      <div class="audit-out"></div>`;
    const form = target.querySelector<HTMLFormElement>(".audit-login")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      void this.api.auditLogin(String(data.get("password") ?? ""))
        .then(() => this.api.auditRecords())
        .then((records) => {
          target.querySelector(".audit-out")!.innerHTML =
            `<p>${records.length} record(s)</p><table class="audit">${
              records.slice(-50).map((r: any) =>
                `<tr><td>${r.sequence_number}</td><td>${r.timestamp}</td>
                 <td>${r.actor_id}</td><td>${r.action}</td></tr>`).join("")
            }</table>`;
        })
        .catch((exc: ApiError) => {
          form.querySelector(".audit-error")!.textContent =
            messageFor(exc.code, exc.message);
        });
    });
  }
}

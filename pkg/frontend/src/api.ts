// Thin client over the gateway HTTP API. Every failure becomes an ApiError
// carrying the server's stable code; the UI never invents its own verdicts.

import { messageFor } from "./errors";

export class ApiError extends Error {
  code: string;
  status: number;
  field?: string;

  constructor(code: string, status: number, message?: string, field?: string) {
    super(messageFor(code, message));
    this.code = code;
    this.status = status;
    this.field = field;
  }
}

export interface LoginResult {
  token: string;
  role_ids: string[];
  active_role_id: string | null;
  pending: boolean;
}

export interface TablePage {
  rows: Record<string, unknown>[];
  total: number;
  page: number;
  size: number;
  columns: string[];
}

export interface Capabilities {
  permissions: string[];
  routes: { name: string; method: string; path: string }[];
  person_id: string;
  level: number;
  active_role_id: string | null;
}

export interface RequestRecord {
  id: string;
  kind: string;
  text: string;
  requester_id: string;
  requester_level: number;
  state: string;
  rejection_reason: string | null;
  created_at: string;
}

export interface FloorPlan {
  location_id: string;
  location_number: string;
  rooms: RoomAnnotation[];
  svg: string;
}

export interface RoomAnnotation {
  location_id: string;
  room_number: string;
  room_type: string;
  assignee: string | null;
  capacity: number | null;
  faculty: string | null;
  department: string | null;
}

export class ApiClient {
  base: string;
  token: string | null = null;
  auditToken: string | null = null;

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  async request<T>(method: string, path: string, body?: unknown,
                   query?: Record<string, string>): Promise<T> {
    let url = this.base + path;
    if (query && Object.keys(query).length) {
      url += "?" + new URLSearchParams(query).toString();
    }
    const headers: Record<string, string> = {};
    if (this.token) headers["X-UUIS-Token"] = this.token;
    if (this.auditToken) headers["X-UUIS-Audit-Token"] = this.auditToken;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const resp = await fetch(url, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    let parsed: any = text;
    const type = resp.headers.get("content-type") ?? "";
    if (type.includes("application/json")) parsed = JSON.parse(text);
    if (!resp.ok) {
      const err = parsed?.error ?? {};
      throw new ApiError(err.code ?? "DATABASE_ERROR", resp.status,
                         err.message, err.field);
    }
    return parsed as T;
  }

  get<T>(path: string, query?: Record<string, string>): Promise<T> {
    return this.request<T>("GET", path, undefined, query);
  }

  post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>("POST", path, body ?? {});
  }

  patch<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("PATCH", path, body);
  }

  // -- sessions ------------------------------------------------------------

  async login(username: string, password: string,
              voiceSample?: string): Promise<LoginResult> {
    const result = await this.post<LoginResult>("/api/session/login", {
      username, password, voice_sample: voiceSample,
    });
    this.token = result.token;
    return result;
  }

  async chooseRole(roleId: string): Promise<{ active_role_id: string }> {
    return this.post("/api/session/role", { role_id: roleId });
  }

  async logout(): Promise<void> {
    await this.post("/api/session/logout");
    this.token = null;
  }

  capabilities(): Promise<Capabilities> {
    return this.get("/api/capabilities");
  }

  // -- inventory -----------------------------------------------------------

  listEntities(kind: string, page = 1, size = 20,
               columns?: string[]): Promise<TablePage> {
    const query: Record<string, string> = {
      page: String(page), size: String(size),
    };
    if (columns?.length) query.columns = columns.join(",");
    return this.get(`/api/${kind}`, query);
  }

  detail(kind: string, id: string): Promise<Record<string, unknown>> {
    return this.get(`/api/${kind}/${id}`);
  }

  create(kind: string, fields: Record<string, unknown>): Promise<any> {
    return this.post(`/api/${kind}`, fields);
  }

  edit(kind: string, id: string, changes: Record<string, unknown>): Promise<any> {
    return this.patch(`/api/${kind}/${id}`, changes);
  }

  deleteRecords(kind: string, ids: string[]): Promise<any[]> {
    return this.post(`/api/${kind}/delete`, { ids });
  }

  importRows(kind: string, text: string, mapping: [number, string][],
             defaultLocationId?: string): Promise<any> {
    return this.post(`/api/import/${kind}`, {
      text, mapping, default_location_id: defaultLocationId,
    });
  }

  // -- requests ------------------------------------------------------------

  submitRequest(kind: string, text: string, barcodes?: string[],
                targetLocationId?: string): Promise<RequestRecord> {
    return this.post(`/api/requests/${kind}`, {
      text, barcodes, target_location_id: targetLocationId,
    });
  }

  listRequests(): Promise<RequestRecord[]> {
    return this.get("/api/requests");
  }

  decide(requestId: string, verdict: "approve" | "reject",
         reason?: string): Promise<RequestRecord> {
    return this.post(`/api/requests/${requestId}/decide`, { verdict, reason });
  }

  // -- search / reports / plan / profile ------------------------------------

  searchBasic(query: string): Promise<any> {
    return this.post("/api/search/basic", { query });
  }

  searchAdvanced(query: string, categories?: string[]): Promise<any> {
    return this.post("/api/search/advanced", {
      query, restriction: categories ? { categories } : undefined,
    });
  }

  capacityReport(locationType: string, comparison: string): Promise<any[]> {
    return this.get("/api/reports/capacity", {
      location_type: locationType, comparison,
    });
  }

  floorplanList(): Promise<{ id: string; location_number: string }[]> {
    return this.get("/api/floorplan");
  }

  floorplan(locationId: string): Promise<FloorPlan> {
    return this.get(`/api/floorplan/${locationId}`);
  }

  profile(): Promise<any> {
    return this.get("/api/profile");
  }

  roles(): Promise<{ id: string; name: string; permissions: string[] }[]> {
    return this.get("/api/roles");
  }

  assignRole(personIds: string[], roleId: string): Promise<any[]> {
    return this.post("/api/persons/assign-role", {
      person_ids: personIds, role_id: roleId,
    });
  }

  assignLocationToPerson(locationIds: string[], personId: string): Promise<any[]> {
    return this.post("/api/locations/assign-to-person", {
      location_ids: locationIds, person_id: personId,
    });
  }

  // -- audit / help / meta ---------------------------------------------------

  async auditLogin(password: string): Promise<string> {
    const result = await this.post<{ audit_token: string }>(
      "/api/audit/login", { password });
    this.auditToken = result.audit_token;
    return result.audit_token;
  }

  auditRecords(): Promise<any[]> {
    return this.get("/api/audit/records");
  }

  help(page: string): Promise<{ page: string; title: string; functions: string[] }> {
    return this.get(`/api/help/${page}`);
  }

  errorTable(): Promise<{ code: string; status: number; message: string }[]> {
    return this.get("/api/errors");
  }

  language(): Promise<{ languages: string[]; active: string }> {
    return this.get("/api/language");
  }
}

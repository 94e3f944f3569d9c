// Zoomable floor plan: pan/zoom over the server's vector document, hover
// tooltips with room number, type, and assignee. Re-fetching reflects any
// reassignment; the client never caches authority.

import { ApiClient, FloorPlan, RoomAnnotation } from "./api";

export class Zoom {
  scale = 1;
  min = 0.25;
  max = 8;

  zoomIn(): number {
    return this.set(this.scale * 1.25);
  }

  zoomOut(): number {
    return this.set(this.scale / 1.25);
  }

  set(value: number): number {
    this.scale = Math.min(this.max, Math.max(this.min, value));
    return this.scale;
  }

  transform(): string {
    return `scale(${this.scale})`;
  }
}

export function tooltipText(room: RoomAnnotation): string {
  const parts = [`${room.room_number} (${room.room_type})`];
  parts.push(room.assignee ? `assigned to ${room.assignee}` : "unassigned");
  if (room.capacity !== null) parts.push(`capacity ${room.capacity}`);
  if (room.department) parts.push(room.department);
  else if (room.faculty) parts.push(room.faculty);
  return parts.join(" · ");
}

export class FloorPlanView {
  private api: ApiClient;
  private root: HTMLElement;
  private locationId: string;
  zoom = new Zoom();
  plan: FloorPlan | null = null;

  constructor(api: ApiClient, root: HTMLElement, locationId: string) {
    this.api = api;
    this.root = root;
    this.locationId = locationId;
  }

  async refresh(): Promise<void> {
    this.plan = await this.api.floorplan(this.locationId);
    this.render();
  }

  private render(): void {
    const plan = this.plan!;
    this.root.innerHTML = "";
    const byRoom = new Map(plan.rooms.map((r) => [r.location_id, r]));

    const toolbar = document.createElement("div");
    toolbar.className = "plan-toolbar";
    const zoomIn = document.createElement("button");
    zoomIn.className = "zoom-in";
    zoomIn.textContent = "+";
    const zoomOut = document.createElement("button");
    zoomOut.className = "zoom-out";
    zoomOut.textContent = "-";
    const printBtn = document.createElement("button");
    printBtn.className = "print";
    printBtn.textContent = "Print";
    printBtn.addEventListener("click", () => window.print());
    toolbar.append(zoomIn, zoomOut, printBtn);

    const viewport = document.createElement("div");
    viewport.className = "plan-viewport";
    viewport.innerHTML = plan.svg;
    const svg = viewport.querySelector("svg");
    const applyZoom = () => {
      if (svg) (svg as SVGElement).style.transform = this.zoom.transform();
    };
    zoomIn.addEventListener("click", () => { this.zoom.zoomIn(); applyZoom(); });
    zoomOut.addEventListener("click", () => { this.zoom.zoomOut(); applyZoom(); });
    applyZoom();

    const tooltip = document.createElement("div");
    tooltip.className = "plan-tooltip";
    tooltip.style.display = "none";

    viewport.querySelectorAll<SVGElement>("[data-location-id]").forEach((el) => {
      const room = byRoom.get(el.dataset.locationId ?? "");
      if (!room) return;
      el.addEventListener("mouseenter", () => {
        tooltip.textContent = tooltipText(room);
        tooltip.style.display = "block";
      });
      el.addEventListener("mouseleave", () => {
        tooltip.style.display = "none";
      });
    });

    this.root.append(toolbar, viewport, tooltip);
  }
}

/** Wire types for the session service. Field names mirror the HTTP payloads. */

export type SessionStatus =
  | "awaiting-selection"
  | "running-novelty"
  | "running-optimize"
  | "solved"
  | "budget-exhausted";

export interface CandidatePayload {
  id: number;
  /** Downsampled trajectory, world coordinates, at most 200 points. */
  trail: [number, number][];
  novelty: number | null;
  solved: boolean;
  hidden: number;
  selected: boolean;
}

export interface PopulationPayload {
  session: string;
  status: SessionStatus;
  evals: number;
  budget: number;
  map: string;
  selected: number[];
  solved: boolean;
  candidates: CandidatePayload[];
  error?: string;
}

export interface MapGeometry {
  version: number;
  name: string;
  bounds: [number, number];
  start: [number, number, number];
  goal: [number, number];
  waypoints: [number, number][];
  walls: [number, number, number, number][];
}

export interface PushMessage {
  type: "progress" | "population" | "solved";
  session: string;
  evals: number;
  payload: PopulationPayload | null;
}

export interface RunRecordJson {
  record_id: string;
  mode: string;
  map: string;
  seed: number | null;
  budget: number;
  evaluations_used: number;
  solved: boolean;
  solution: Record<string, unknown> | null;
  solution_hidden: number | null;
  final_positions: [number, number][];
  wall_seconds: number;
  events: Record<string, unknown>[] | null;
  archive: Record<string, unknown> | null;
}

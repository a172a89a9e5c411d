/** Wire-format documents exchanged with the grading API. */

export type SemType = "int" | "float" | "bool" | "str";

export const SEM_TYPES: SemType[] = ["int", "float", "bool", "str"];

export interface ArgSpecDoc {
  name: string;
  type: SemType;
}

export interface FunctionSpecDoc {
  name: string;
  args: ArgSpecDoc[];
  return: SemType;
}

export interface PredefinedTestDoc {
  data: string;
  feedback?: Record<string, string>;
}

export interface RandomSpecDoc {
  n: number;
  args: string[];
  seed?: number;
}

export interface TestPlanDoc {
  predefined?: PredefinedTestDoc[];
  random?: RandomSpecDoc;
}

export interface TaskConfigDoc {
  spec: FunctionSpecDoc;
  test: TestPlanDoc;
  solution: Record<string, string>;
}

export interface ManifestDoc {
  task_id: string;
  task_type: string;
  language: string;
  created_at: string;
  config_digest: string;
}

/** What learners may see: signature and predefined inputs only. */
export interface PublicTaskView {
  task_id: string;
  language: string;
  spec: FunctionSpecDoc;
  predefined: string[];
}

export interface FailureExampleDoc {
  input: string;
  expected: string;
  actual: string;
}

export interface FeedbackDoc {
  example?: FailureExampleDoc;
  message?: string;
  stats: { succeeded: number; total: number };
  score: number;
}

export type GradeStatus = "success" | "failed" | "error";

export interface GradeOutputDoc {
  tid: string;
  status: GradeStatus;
  feedback?: FeedbackDoc;
  error_detail?: string;
}

export interface ExecuteEnvelope {
  tid: string;
  status: string;
  output: string;
}

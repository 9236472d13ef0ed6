export type TaskKind = 'ranking' | 'verification';

export interface Candidate {
  label: string;
  text: string;
}

/** A task as served by `GET /api/tasks/next` (anonymized labels only). */
export interface ReviewTask {
  case_id: string;
  kind: TaskKind;
  lang: string;
  question: string;
  options: Record<string, string>;
  answers: string[];
  reference_rationale: string | null;
  candidates?: Candidate[];
}

export type Verdict = 'qualified' | 'unqualified';

export interface RankingSubmission {
  case_id: string;
  annotator: string;
  kind: 'ranking';
  ranking: string[];
}

export interface VerificationSubmission {
  case_id: string;
  annotator: string;
  kind: 'verification';
  verdict: Verdict;
}

export type Submission = RankingSubmission | VerificationSubmission;

export interface Progress {
  total_cases: number;
  annotators: Record<string, Record<string, number>>;
}

/** The ranking rubric shown to every annotator. */
export const RANKING_CRITERIA = [
  'Accuracy',
  'Reasoning Ability',
  'Integration of Internal Knowledge',
] as const;

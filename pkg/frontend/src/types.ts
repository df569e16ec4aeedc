export type FeatureKind = "numeric" | "categorical";

export interface FeatureInfo {
  name: string;
  kind: FeatureKind;
  domain?: string[];
  value_range?: [number, number];
}

export interface SchemaInfo {
  features: FeatureInfo[];
  labels: [string, string];
}

export type Instance = Record<string, number | string>;

export interface PredictionResponse {
  prediction: string;
  sc_prediction: string;
  hc_prediction: string;
  user_label: string | null;
  explanation: string | null;
  transformation_description: string | null;
  feedback_rule_id: string | null;
}

export interface RuleText {
  clause: string;
  label: string;
}

export interface TransformationInfo {
  description: string;
  actions: unknown[];
}

export interface FeedbackRuleInfo {
  id: string;
  corrected: RuleText;
  original?: RuleText;
  transformation?: TransformationInfo;
  seq: number;
}

export interface InstancePage {
  split: string;
  total: number;
  offset: number;
  rows: { instance: Instance; label: string }[];
}

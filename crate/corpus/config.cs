namespace Util
{
    public static class Config
    {
        public const int DefaultPort = 7130;
        private static string mode;

        public static int Port(string env)
        {
            switch (env)
            {
                case "prod":
                    return 80;
                case "test":
                    return DefaultPort + 1;
                default:
                    return DefaultPort;
            }
        }

        public static void SetMode(string m)
        {
            mode = m.Trim();
        }

        public class Entry
        {
            public string Key;
            public string Value;
        }
    }
}

using Ui;
using Geom;

namespace App
{
    public class Controller
    {
        private Button ok;
        private Curve path;

        public Controller()
        {
            ok = new Button();
            path = new Curve(16);
        }

        public void OnClick(object sender, int x, int y)
        {
            Point p = new Point(x, y);
            path.Add(p);
            Log.Write(p.X);
        }

        public void Run()
        {
            ok.Press(1, 2);
            double len = path.Length();
        }
    }
}
